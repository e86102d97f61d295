#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "tfc/equilibrium.hpp"

using namespace tfc;
using doctest::Approx;

namespace {

Word w(const char* text, int q = 2) { return Word::parse(text, q); }

Cocycle scalar23() { return Cocycle(Subshift::full(2), {oracle::scalar(2), oracle::scalar(3)}, 1.0); }

Cocycle identity_full(int q, int d) {
  return Cocycle(Subshift::full(q), std::vector<Matrix>(static_cast<std::size_t>(q), Matrix::Identity(d, d)), 1.0);
}

Cocycle random_cocycle(std::mt19937_64& rng, const AdjacencyMatrix& t, int d) {
  std::vector<Matrix> gens;
  for (std::size_t a = 0; a < t.size(); ++a) gens.push_back(oracle::random_matrix(rng, d));
  return Cocycle(Subshift(t, 0.5), gens, 1.0);
}

/// Bernoulli(2/5, 3/5) cylinder probability.
double bernoulli(const Word& x) {
  double p = 1.0;
  for (int s : x.symbols) p *= s == 0 ? 0.4 : 0.6;
  return p;
}

}  // namespace

TEST_CASE("gibbs_nu examples") {
  const auto u = gibbs_nu(identity_full(2, 2), 1.0, 3);
  REQUIRE(u.words.size() == 8);
  for (double v : u.weights) CHECK(v == Approx(0.125).epsilon(1e-15));
  const auto n1 = gibbs_nu(scalar23(), 1.0, 1);
  CHECK(n1.weights[0] == Approx(0.4).epsilon(1e-15));
  CHECK(n1.weights[1] == Approx(0.6).epsilon(1e-15));
  const auto n2 = gibbs_nu(scalar23(), 1.0, 2);
  const std::vector<double> want{4.0 / 25, 6.0 / 25, 6.0 / 25, 9.0 / 25};
  for (std::size_t i = 0; i < 4; ++i) CHECK(n2.weights[i] == Approx(want[i]).epsilon(1e-15));
  CHECK(n2.weight_of(w("21")) == Approx(6.0 / 25));
  CHECK(n2.weight_of(w("2")) == 0.0);
}

TEST_CASE("gibbs_nu matches the plain oracle and is a probability vector") {
  std::mt19937_64 rng(3);
  const AdjacencyMatrix t{{1, 1, 0}, {0, 1, 1}, {1, 1, 1}};
  const auto c = random_cocycle(rng, t, 2);
  const auto nu = gibbs_nu(c, 1.4, 5);
  const double total = oracle::alpha(c.generators(), t, 1.4, 5);
  const auto words = oracle::words(t, 5);
  REQUIRE(nu.words.size() == words.size());
  for (std::size_t i = 0; i < words.size(); ++i)
    CHECK(nu.weights[i] == Approx(oracle::phi(oracle::product(c.generators(), words[i]), 1.4) / total).epsilon(1e-11));
  CHECK(std::abs(nu.total() - 1.0) <= 1e-12);
}

TEST_CASE("gibbs_mu examples") {
  const auto mu = gibbs_mu(identity_full(3, 1), 1.0, 6, 2);
  for (double v : mu.weights) CHECK(v == Approx(1.0 / 9).epsilon(1e-14));
  for (int m = 1; m <= 4; ++m) {
    const auto b = gibbs_mu(scalar23(), 1.0, 8, m);
    for (std::size_t i = 0; i < b.words.size(); ++i) CHECK(b.weights[i] == Approx(bernoulli(b.words[i])).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gibbs_mu(scalar23(), 1.0, 4, 5), std::invalid_argument);
  CHECK_THROWS_AS(gibbs_mu(scalar23(), 1.0, 4, 0), std::invalid_argument);
}

TEST_CASE("gibbs_mu is a pushforward average (oracle)") {
  std::mt19937_64 rng(5);
  const AdjacencyMatrix t{{1, 1}, {1, 0}};
  const auto c = random_cocycle(rng, t, 2);
  const int n = 6, m = 3;
  const auto mu = gibbs_mu(c, 0.8, n, m);
  const auto nu = gibbs_nu(c, 0.8, n);
  for (std::size_t k = 0; k < mu.words.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < nu.words.size(); ++j)
      for (int i = 0; i <= n - m; ++i)
        if (nu.words[j].slice(static_cast<std::size_t>(i), m) == mu.words[k]) acc += nu.weights[j];
    CHECK(mu.weights[k] == Approx(acc / (n - m + 1)).epsilon(1e-12));
  }
  CHECK(std::abs(mu.total() - 1.0) <= 1e-12);
}

TEST_CASE("shift invariance defect decays with n") {
  std::mt19937_64 rng(7);
  const auto c = random_cocycle(rng, {{1, 1, 0}, {0, 1, 1}, {1, 1, 1}}, 2);
  const double d4 = shift_invariance_defect(gibbs_mu(c, 1.0, 4, 3));
  const double d8 = shift_invariance_defect(gibbs_mu(c, 1.0, 8, 3));
  CHECK(d8 < d4);
  CHECK(shift_invariance_defect(gibbs_mu(scalar23(), 1.0, 6, 3)) <= 1e-14);
}

TEST_CASE("Gibbs ratios") {
  const auto c = scalar23();
  for (int m = 1; m <= 6; ++m) {
    const auto r = gibbs_ratio_check(gibbs_mu(c, 1.0, 10, m), c, 1.0, std::log(5.0));
    CHECK(std::abs(r.min_ratio - 1) <= 1e-9);
    CHECK(std::abs(r.max_ratio - 1) <= 1e-9);
    CHECK(r.zero_weight.empty());
  }
  const auto id = identity_full(2, 2);
  const auto ri = gibbs_ratio_check(gibbs_mu(id, 1.0, 6, 3), id, 1.0, std::log(2.0));
  CHECK(ri.min_ratio == Approx(1.0));
  CHECK(ri.max_ratio == Approx(1.0));
  const double delta = 0.01;
  const auto rd = gibbs_ratio_check(gibbs_mu(c, 1.0, 10, 4), c, 1.0, std::log(5.0) + delta);
  CHECK(rd.min_ratio == Approx(std::exp(4 * delta)).epsilon(1e-9));
  CHECK(rd.gibbs_constant == Approx(std::exp(4 * delta)).epsilon(1e-9));
}

TEST_CASE("Gibbs ratios report zero-weight cylinders") {
  CylinderMeasure mu;
  mu.n = 1;
  mu.words = {w("1"), w("2")};
  mu.weights = {1.0, 0.0};
  const auto r = gibbs_ratio_check(mu, scalar23(), 1.0, std::log(5.0));
  REQUIRE(r.zero_weight.size() == 1);
  CHECK(r.zero_weight[0].str() == "2");
}

TEST_CASE("variational gap") {
  const auto id = identity_full(2, 2);
  const auto bid = pressure_bracket(id, 1.0, 6, nullptr);
  const auto vid = variational_terms(id, 1.0, gibbs_mu(id, 1.0, 6, 3), bid);
  CHECK(vid.entropy == Approx(std::log(2.0)).epsilon(1e-13));
  CHECK(std::abs(vid.energy) <= 1e-15);
  CHECK(std::abs(vid.gap) <= 1e-13);

  const auto c = scalar23();
  // Upper bound alone: it is exact here, while the certified midpoint sits C/(2n) below it.
  const auto b = pressure_bracket(c, 1.0, 10, nullptr);
  // Bernoulli identity: -sum p log p + sum p log a = log 5.
  const double gap6 = variational_gap(c, 1.0, gibbs_mu(c, 1.0, 10, 6), b);
  const double gap3 = variational_gap(c, 1.0, gibbs_mu(c, 1.0, 10, 3), b);
  CHECK(std::abs(gap6) <= 1e-10);
  CHECK(gap6 <= gap3 + 1e-9);
}

TEST_CASE("variational gap is bounded below by the bracket width") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 3; ++rep) {
    const auto c = random_cocycle(rng, oracle::full_adjacency(2), 2);
    const auto cert = extend_certificate_to_s(qm_search(c, {1, 2}, 3, 2));
    const auto b = pressure_bracket(c, 1.0, 8, &cert);
    const double width = b.certified() ? b.upper - *b.lower : INFINITY;
    for (int m : {3, 6}) CHECK(variational_gap(c, 1.0, gibbs_mu(c, 1.0, 8, m), b) >= -(width + 1e-9));
  }
}

TEST_CASE("weighted pressure examples") {
  const auto c = scalar23();
  CHECK(weighted_pressure(c, {1.0}, {1}, 6, nullptr).upper == Approx(std::log(5.0)).epsilon(1e-14));
  CHECK(weighted_pressure(c, {2.0}, {1}, 6, nullptr).upper == Approx(std::log(13.0)).epsilon(1e-14));
  CHECK_THROWS_AS(weighted_pressure(c, {0.0}, {1}, 4, nullptr), std::invalid_argument);
  CHECK_THROWS_AS(weighted_pressure(c, {1.0}, {2}, 4, nullptr), std::invalid_argument);
  const Cocycle d2(Subshift::full(2), {oracle::diag({2, 1}), oracle::diag({1, 3})}, 1.0);
  CHECK_THROWS_AS(weighted_pressure(d2, {1.0, 1.0}, {1, 1}, 4, nullptr), std::invalid_argument);
}

TEST_CASE("weighted pressure on the diagonal system matches an exhaustive oracle") {
  const Cocycle c(Subshift::full(2), {oracle::diag({2, 1}), oracle::diag({1, 3})}, 1.0);
  const int n = 6;
  double sum = 0.0;
  for (const auto& x : oracle::words(oracle::full_adjacency(2), n)) {
    const Matrix p = oracle::product(c.generators(), x);
    sum += oracle::phi(p, 1) * oracle::phi(p, 2);
  }
  CHECK(weighted_pressure(c, {1.0, 1.0}, {1, 2}, n, nullptr).upper == Approx(std::log(sum) / n).epsilon(1e-13));
}

TEST_CASE("weighted pressure at d = 1 equals pressure_bracket bit for bit") {
  const auto c = scalar23();
  const auto cert = extend_certificate_to_s(qm_search(c, {1}, 3, 2));
  for (double s : {0.5, 1.0, 2.0, 3.25}) {
    const auto a = weighted_pressure(c, {s}, {1}, 7, &cert);
    const auto b = pressure_bracket(c, s, 7, &cert);
    CHECK(a.upper == b.upper);
    REQUIRE(a.certified());
    CHECK(*a.lower == *b.lower);
    CHECK(*a.fekete_C == *b.fekete_C);
  }
}

TEST_CASE("multifractal point for the scalar Bernoulli family") {
  const auto c = scalar23();
  const auto pt = multifractal_point(c, {1.0}, {1}, 8, nullptr);
  const double alpha = (2 * std::log(2.0) + 3 * std::log(3.0)) / 5;
  CHECK(pt.alpha_vec[0] == Approx(alpha).epsilon(1e-9));
  CHECK(std::abs(pt.alpha_vec[0] - 0.93644) < 5e-5);
  CHECK(pt.level_entropy == Approx(std::log(5.0) - alpha).epsilon(1e-8));
  CHECK(std::abs(pt.level_entropy - 0.67299) < 5e-5);
  CHECK(pt.gradient_consistent);
  CHECK(pt.level_entropy_nonnegative);
  CHECK_THROWS_AS(multifractal_point(c, {1e-5}, {1}, 8, nullptr), std::invalid_argument);
}

TEST_CASE("multifractal point for the identity cocycle") {
  const auto pt = multifractal_point(identity_full(3, 1), {1.5}, {1}, 5, nullptr);
  CHECK(std::abs(pt.alpha_vec[0]) <= 1e-9);
  CHECK(pt.level_entropy == Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("weighted pressure is convex in q") {
  std::mt19937_64 rng(13);
  const auto c = random_cocycle(rng, oracle::full_adjacency(2), 2);
  std::vector<double> p;
  for (double q = 0.25; q <= 3.0; q += 0.25) p.push_back(weighted_pressure(c, {q}, {1}, 6, nullptr).upper);
  for (std::size_t i = 1; i + 1 < p.size(); ++i) CHECK(p[i + 1] - 2 * p[i] + p[i - 1] >= -1e-9);
}

TEST_CASE("Legendre consistency at probe points") {
  const auto c = scalar23();
  const auto pt = multifractal_point(c, {1.0}, {1}, 8, nullptr);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.05, 4.0);
  for (int i = 0; i < 20; ++i) {
    const double q = u(rng);
    const double pq = weighted_pressure(c, {q}, {1}, 8, nullptr).midpoint();
    CHECK(pt.level_entropy <= pq - pt.alpha_vec[0] * q + 1e-6);
  }
}

TEST_CASE("two-index multifractal gradient matches finite differences of an oracle") {
  const Cocycle c(Subshift::full(2), {oracle::diag({2, 1}), oracle::diag({1, 3})}, 1.0);
  const auto pt = multifractal_point(c, {1.0, 0.5}, {1, 2}, 6, nullptr);
  REQUIRE(pt.alpha_vec.size() == 2);
  auto p = [&](double q1, double q2) {
    double sum = 0.0;
    for (const auto& x : oracle::words(oracle::full_adjacency(2), 6)) {
      const Matrix m = oracle::product(c.generators(), x);
      sum += std::pow(oracle::phi(m, 1), q1) * std::pow(oracle::phi(m, 2), q2);
    }
    return std::log(sum) / 6;
  };
  const double h = 1e-5;
  CHECK(pt.alpha_vec[0] == Approx((p(1 + h, 0.5) - p(1 - h, 0.5)) / (2 * h)).epsilon(1e-6));
  CHECK(pt.alpha_vec[1] == Approx((p(1, 0.5 + h) - p(1, 0.5 - h)) / (2 * h)).epsilon(1e-6));
}
