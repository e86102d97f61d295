#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "tfc/parallel.hpp"
#include "tfc/pressure.hpp"

using namespace tfc;
using doctest::Approx;

namespace {

Cocycle identity_full(int q, int d) {
  return Cocycle(Subshift::full(q), std::vector<Matrix>(static_cast<std::size_t>(q), Matrix::Identity(d, d)), 1.0);
}

Cocycle scalar23() { return Cocycle(Subshift::full(2), {oracle::scalar(2), oracle::scalar(3)}, 1.0); }

Cocycle golden_identity() { return Cocycle(Subshift({{1, 1}, {1, 0}}, 0.5), {oracle::scalar(1), oracle::scalar(1)}, 1.0); }

Cocycle random_cocycle(std::mt19937_64& rng, const AdjacencyMatrix& t, int d) {
  std::vector<Matrix> gens;
  for (std::size_t a = 0; a < t.size(); ++a) gens.push_back(oracle::random_matrix(rng, d));
  return Cocycle(Subshift(t, 0.5), gens, 1.0);
}

}  // namespace

TEST_CASE("log_sum_exp") {
  const std::vector<double> xs{std::log(1.0), std::log(2.0), std::log(3.0)};
  CHECK(log_sum_exp(xs) == Approx(std::log(6.0)).epsilon(1e-15));
  const std::vector<double> huge{1000.0, 1000.0};
  CHECK(log_sum_exp(huge) == Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(log_sum_exp(std::vector<double>{}) == -INFINITY);
}

TEST_CASE("log_alpha_n examples") {
  for (double s : {0.0, 0.5, 1.7, 3.0}) CHECK(log_alpha_n(identity_full(2, 2), s, 5) == Approx(5 * std::log(2.0)).epsilon(1e-14));
  CHECK(log_alpha_n(scalar23(), 1.0, 4) == Approx(4 * std::log(5.0)).epsilon(1e-14));
  for (double s : {0.0, 1.0, 2.5}) CHECK(log_alpha_n(golden_identity(), s, 4) == Approx(std::log(8.0)).epsilon(1e-14));
  CHECK_THROWS_AS(log_alpha_n(scalar23(), -1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(log_alpha_n(scalar23(), 1.0, 0), std::invalid_argument);
}

TEST_CASE("log_alpha_n matches the plain-sum oracle") {
  std::mt19937_64 rng(5);
  const AdjacencyMatrix t{{1, 1, 0}, {0, 1, 1}, {1, 1, 1}};
  const auto c = random_cocycle(rng, t, 2);
  for (int n = 1; n <= 6; ++n)
    for (double s : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5})
      CHECK(log_alpha_n(c, s, n) == Approx(std::log(oracle::alpha(c.generators(), t, s, n))).epsilon(1e-12));
}

TEST_CASE("log-space sum survives values beyond double range") {
  const Cocycle big(Subshift::full(2), {oracle::scalar(1e30), oracle::scalar(2e30)}, 1.0);
  const double v = log_alpha_n(big, 1.0, 12);
  CHECK(std::isfinite(v));
  CHECK(v == Approx(12 * std::log(3e30)).epsilon(1e-13));
}

TEST_CASE("pressure_upper examples and subadditivity") {
  for (int n = 1; n <= 8; ++n) CHECK(pressure_upper(identity_full(2, 2), 1.3, n) == Approx(std::log(2.0)).epsilon(1e-14));
  for (int n = 1; n <= 8; ++n) CHECK(pressure_upper(scalar23(), 1.0, n) == Approx(std::log(5.0)).epsilon(1e-14));
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    const auto c = random_cocycle(rng, oracle::full_adjacency(2), 2);
    for (double s : {0.5, 1.0, 1.5})
      for (auto [n, m] : {std::pair{2, 2}, std::pair{4, 2}, std::pair{3, 2}, std::pair{2, 3}}) {
        CHECK(pressure_upper(c, s, n * m) <= pressure_upper(c, s, n) + 1e-12);
      }
  }
}

TEST_CASE("partition sum does not depend on the thread count") {
  std::mt19937_64 rng(9);
  const auto c = random_cocycle(rng, {{1, 1, 0}, {0, 1, 1}, {1, 1, 1}}, 3);
  parallel::set_thread_count(1);
  const double one = log_alpha_n(c, 1.3, 9);
  parallel::set_thread_count(8);
  const double eight = log_alpha_n(c, 1.3, 9);
  parallel::set_thread_count(0);
  CHECK(one == eight);
}

TEST_CASE("fekete constant formula") {
  // C = log(c^{-1} sum_{i<=k} C1^i)
  const double c = 0.25, c1 = 6.0;
  CHECK(fekete_constant_from_logs(std::log(c), std::log(c1), 2) == Approx(std::log((1 + 6 + 36) / 0.25)).epsilon(1e-14));
  CHECK(fekete_constant_from_logs(0.0, std::log(c1), 0) == 0.0);
  CHECK_THROWS_AS(fekete_constant_from_logs(0.0, 1.0, -1), std::invalid_argument);
}

TEST_CASE("identity cocycle bracket is exact") {
  const auto c = identity_full(2, 2);
  const auto cert = extend_certificate_to_s(qm_search(c, {1, 2}, 3, 1));
  CHECK(cert.c == 1.0);
  CHECK(cert.k == 0);
  for (int n = 1; n <= 10; ++n) {
    const auto b = pressure_bracket(c, 1.0, n, &cert);
    REQUIRE(b.certified());
    CHECK(*b.fekete_C == 0.0);
    CHECK(*b.lower == Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(b.upper == Approx(std::log(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("bracket width is C/n and contains the true pressure") {
  const auto c = scalar23();
  const auto cert = extend_certificate_to_s(qm_search(c, {1}, 3, 2));
  for (int n = 1; n <= 10; ++n)
    for (double s : {0.5, 1.0, 2.0}) {
      const auto b = pressure_bracket(c, s, n, &cert);
      REQUIRE(b.certified());
      CHECK(b.upper - *b.lower == Approx(*b.fekete_C / n).epsilon(1e-12));
      const double truth = std::log(std::pow(2.0, s) + std::pow(3.0, s));
      CHECK(*b.lower <= truth + 1e-12);
      CHECK(b.upper >= truth - 1e-12);
      CHECK(b.log_alpha == Approx(n * b.upper));
    }
}

TEST_CASE("brackets without a certificate are one-sided") {
  const auto b = pressure_bracket(scalar23(), 1.0, 4, nullptr);
  CHECK_FALSE(b.certified());
  CHECK_FALSE(b.fekete_C.has_value());
  CHECK(b.midpoint() == b.upper);
  QMCertificate zero;
  zero.dim = 1;
  zero.t_set = {1};
  zero.c_per_t = {0.0};
  CHECK_FALSE(pressure_bracket(scalar23(), 1.0, 4, &zero).certified());
}

TEST_CASE("certificate checks") {
  const auto c = scalar23();
  const auto cert = qm_search(c, {1}, 2, 1);
  CHECK_THROWS_AS(pressure_lower(c, 0.5, 4, cert), std::invalid_argument);  // integer-only
  CHECK_NOTHROW(pressure_lower(c, 1.0, 4, cert));
  CHECK_THROWS_AS(pressure_lower(golden_identity(), 1.0, 4, cert), std::invalid_argument);  // other cocycle
  CHECK_THROWS_AS(pressure_lower(identity_full(2, 2), 1.0, 4, cert), std::invalid_argument);  // other dimension
}

TEST_CASE("golden-mean identity converges to the golden ratio from above") {
  const auto c = golden_identity();
  const double truth = std::log((1 + std::sqrt(5.0)) / 2);
  double prev = INFINITY;
  for (int n = 1; n <= 12; ++n) {
    const double u = pressure_upper(c, 1.0, n);
    CHECK(u >= truth - 1e-12);
    CHECK(u <= prev + 1e-12);
    prev = u;
  }
  CHECK(prev - truth < 5e-2);
}

TEST_CASE("pressure curve") {
  const auto id = identity_full(3, 1);
  const auto rows = pressure_curve(id, nullptr, {0.0, 0.5, 1.0}, 4);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) CHECK(r.upper == Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(pressure_curve(scalar23(), nullptr, {1.0}, 5)[0].upper == Approx(std::log(5.0)).epsilon(1e-14));
}

TEST_CASE("Lipschitz bound in s") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 4; ++rep) {
    const auto c = random_cocycle(rng, oracle::full_adjacency(2), 2);
    const double lip = pressure_lipschitz_constant(c);
    CHECK(lip >= std::log(c.upsilon()));
    for (double s = 0.0; s < 2.0; s += 0.25) {
      const double t = s + 0.25;
      CHECK(std::abs(pressure_upper(c, s, 6) - pressure_upper(c, t, 6)) <= 0.25 * lip + 1e-9);
    }
  }
}

TEST_CASE("pressure is decreasing for contractions") {
  const Cocycle c(Subshift::full(2), {oracle::diag({0.5, 0.25}), 0.6 * oracle::rotation(0.4)}, 1.0);
  for (double s = 0.0; s < 4.0; s += 0.25) CHECK(pressure_upper(c, s + 0.25, 6) < pressure_upper(c, s, 6));
}

TEST_CASE("Bowen root for similarity ratios 1/3") {
  const Cocycle c(Subshift::full(2), {oracle::scalar(1.0 / 3), oracle::scalar(1.0 / 3)}, 1.0);
  const auto start = std::chrono::steady_clock::now();
  const auto r = bowen_root(c, dimension_certificate(c));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(r.converged);
  CHECK(std::abs(r.s_star - std::log(2.0) / std::log(3.0)) <= 1e-6);
  CHECK(r.s_hi - r.s_lo <= 1e-6);
  CHECK(r.root_lower() <= 0.0);
  CHECK(r.root_upper() >= 0.0);
  CHECK(secs < 10.0);
}

TEST_CASE("Bowen root for q maps of ratio 1/q") {
  for (int q : {2, 3}) {
    const Cocycle c(Subshift::full(q), std::vector<Matrix>(static_cast<std::size_t>(q), oracle::scalar(1.0 / q)), 1.0);
    const auto r = bowen_root(c, dimension_certificate(c), 1e-10);
    CHECK(r.converged);
    CHECK(std::abs(r.s_star - 1.0) <= 1e-9);
  }
}

TEST_CASE("Bowen root for unequal similarity ratios matches the Moran equation") {
  const double a = 0.2, b = 0.45;
  const Cocycle c(Subshift::full(2), {oracle::scalar(a), oracle::scalar(b)}, 1.0);
  const auto r = bowen_root(c, dimension_certificate(c));
  // Oracle: bisection on a^s + b^s = 1.
  double lo = 0, hi = 1;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::pow(a, mid) + std::pow(b, mid) > 1 ? lo : hi) = mid;
  }
  CHECK(r.converged);
  CHECK(std::abs(r.s_star - lo) <= 1e-6);
}

TEST_CASE("Bowen root for commuting diagonal contractions") {
  const Matrix m = oracle::diag({0.5, 0.25});
  const auto r = affinity_dimension({m, m});
  // alpha_n^s = 2^n phi^s(diag(2^-n, 4^-n)); closed-form pressure, root by bisection.
  auto p = [](double s) {
    if (s <= 1) return std::log(2.0) * (1 - s);
    if (s <= 2) return std::log(2.0) - std::log(2.0) - (s - 1) * std::log(4.0);
    return std::log(2.0) - s / 2 * std::log(8.0);
  };
  double lo = 0, hi = 4;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (p(mid) > 0 ? lo : hi) = mid;
  }
  CHECK(r.converged);
  CHECK(std::abs(r.s_star - lo) <= 1e-6);
  CHECK(std::abs(r.s_star - 1.0) <= 1e-6);
}

TEST_CASE("affinity_dimension contract") {
  CHECK(affinity_dimension({oracle::scalar(0.5), oracle::scalar(0.5)}, 1e-10).s_star == Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(affinity_dimension({oracle::scalar(0.5), oracle::scalar(1.0)}), std::invalid_argument);
  const auto single = affinity_dimension({oracle::scalar(0.4)});
  CHECK(single.degenerate);
  CHECK(single.s_star == 0.0);
}

TEST_CASE("Bowen root rejects integer-only or empty certificates") {
  const Cocycle c(Subshift::full(2), {oracle::scalar(1.0 / 3), oracle::scalar(1.0 / 3)}, 1.0);
  CHECK_THROWS_AS(bowen_root(c, qm_search(c, {1}, 2, 1)), std::invalid_argument);
  const Cocycle expanding(Subshift::full(2), {oracle::scalar(3), oracle::scalar(2)}, 1.0);
  CHECK_THROWS_AS(bowen_root(expanding, dimension_certificate(expanding)), std::invalid_argument);
}

TEST_CASE("Bowen root with a loose certificate stalls honestly") {
  // A tiny certificate constant widens brackets until they cannot separate from 0 at n <= 4.
  const Cocycle c(Subshift::full(2), {oracle::scalar(1.0 / 3), oracle::scalar(1.0 / 3)}, 1.0);
  auto cert = dimension_certificate(c);
  cert.c = 1e-6;
  for (auto& v : cert.c_per_t) v = std::min(v, 1e-6);
  cert.c_per_t.front() = 1.0;
  const auto r = bowen_root(c, cert, 1e-6, 4);
  CHECK_FALSE(r.converged);
  CHECK(r.s_lo <= std::log(2.0) / std::log(3.0));
  CHECK(r.s_hi >= std::log(2.0) / std::log(3.0));
  CHECK_FALSE(r.warnings.empty());
}
