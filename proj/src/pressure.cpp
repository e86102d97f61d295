#include "tfc/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tfc/parallel.hpp"

namespace tfc {

double log_sum_exp(std::span<const double> xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double total = 0.0;
  for (double x : xs) total += std::exp(x - hi);
  return hi + std::log(total);
}

double log_partition_sum(const Cocycle& c, int n, const std::function<double(std::span<const double>)>& log_weight) {
  if (n < 1) throw std::invalid_argument("depth n must be >= 1");
  const auto prefixes = partition_prefixes(c.subshift(), n);
  std::vector<double> partials(prefixes.size());
  parallel::run_tasks(prefixes.size(), [&](std::size_t p) {
    std::vector<double> terms;
    for_each_extension(c, prefixes[p], n, [&](const Word&, const Matrix& product, int exp2) {
      terms.push_back(log_weight(scaled_log_singular_values(product, exp2)));
    });
    partials[p] = log_sum_exp(terms);
  });
  const double out = log_sum_exp(partials);
  if (!std::isfinite(out)) throw std::logic_error("partition sum is not finite");
  return out;
}

double log_alpha_n(const Cocycle& c, double s, int n) {
  if (!(s >= 0.0)) throw std::invalid_argument("s must be >= 0");
  return log_partition_sum(c, n, [s](std::span<const double> sv) { return log_phi_from_log_sv(sv, s); });
}

double pressure_upper(const Cocycle& c, double s, int n) { return log_alpha_n(c, s, n) / n; }

double fekete_constant_from_logs(double log_c, double log_c1, int k) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  std::vector<double> terms;
  for (int i = 0; i <= k; ++i) terms.push_back(i * log_c1);
  return -log_c + log_sum_exp(terms);
}

void check_certificate(const Cocycle& c, double s, const QMCertificate& cert) {
  if (cert.dim != c.dim())
    throw std::invalid_argument("certificate is for dimension " + std::to_string(cert.dim) + ", cocycle has " +
                                std::to_string(c.dim()));
  if (cert.cocycle_fingerprint != 0 && cert.cocycle_fingerprint != c.fingerprint())
    throw std::invalid_argument("certificate was issued for a different cocycle");
  if (!cert.covers(s)) throw std::invalid_argument("certificate does not cover s = " + std::to_string(s));
}

double fekete_constant(const Cocycle& c, double s, const QMCertificate& cert) {
  check_certificate(c, s, cert);
  const double log_c1 = s * std::log(c.upsilon()) + std::log(static_cast<double>(c.alphabet_size()));
  return fekete_constant_from_logs(cert.log_constant_for(s), log_c1, cert.k);
}

double pressure_lower(const Cocycle& c, double s, int n, const QMCertificate& cert) {
  const double big_c = fekete_constant(c, s, cert);
  return pressure_upper(c, s, n) - big_c / n;
}

PressureBracket pressure_bracket(const Cocycle& c, double s, int n, const QMCertificate* cert) {
  PressureBracket b;
  b.s = s;
  b.n = n;
  b.log_alpha = log_alpha_n(c, s, n);
  b.upper = b.log_alpha / n;
  if (cert != nullptr && cert->c > 0.0 && !cert->failing_pair) {
    b.fekete_C = fekete_constant(c, s, *cert);
    b.lower = b.upper - *b.fekete_C / n;
  }
  return b;
}

std::vector<PressureBracket> pressure_curve(const Cocycle& c, const QMCertificate* cert,
                                            const std::vector<double>& s_grid, int n) {
  std::vector<PressureBracket> out;
  out.reserve(s_grid.size());
  for (double s : s_grid) out.push_back(pressure_bracket(c, s, n, cert));
  return out;
}

double pressure_lipschitz_constant(const Cocycle& c) {
  return std::max(std::log(c.upsilon()), -std::log(c.varrho()));
}

QMCertificate dimension_certificate(const Cocycle& c, int horizon_L, int k_max) {
  std::vector<int> t_set;
  for (int t = 1; t <= c.dim(); ++t) t_set.push_back(t);
  return extend_certificate_to_s(qm_search(c, t_set, horizon_L, k_max));
}

BowenResult bowen_root(const Cocycle& c, const QMCertificate& cert, double tol_s, int n_max) {
  if (!(tol_s > 0.0)) throw std::invalid_argument("tol_s must be positive");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  const double cap = 2.0 * c.dim();
  if (!cert.real_s) throw std::invalid_argument("root finding needs a certificate valid for real s");
  check_certificate(c, cap, cert);
  if (cert.failing_pair || !(cert.c > 0.0)) throw std::invalid_argument("certificate has c = 0; no lower bounds");

  std::vector<int> depths;
  for (int n : kDepthSchedule)
    if (n <= n_max) depths.push_back(n);
  if (depths.empty()) depths.push_back(n_max);

  BowenResult r;
  if (c.max_norm() >= 1.0)
    r.warnings.push_back("some generator has norm >= 1; the root is not an affinity dimension");

  if (c.alphabet_size() == 1) {
    r.degenerate = true;
    r.converged = true;
    r.n_used = depths.front();
    r.at_lo = r.at_hi = pressure_bracket(c, 0.0, r.n_used, &cert);
    r.warnings.push_back("topological entropy is 0; root is the boundary s = 0");
    return r;
  }

  double lo = 0.0;
  double hi = cap;
  bool hi_ok = false;
  for (int n : depths) {
    r.n_used = n;
    if (pressure_upper(c, hi, n) < 0.0) {
      hi_ok = true;
      break;
    }
  }
  if (!hi_ok) throw std::invalid_argument("pressure does not become negative for s <= 2d; no root within the cap");

  bool stalled = false;
  while (hi - lo > tol_s) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    bool resolved = false;
    for (int n : depths) {
      const auto b = pressure_bracket(c, mid, n, &cert);
      r.n_used = std::max(r.n_used, n);
      if (*b.lower > 0.0) {
        lo = mid;
      } else if (b.upper < 0.0) {
        hi = mid;
      } else if (*b.lower == 0.0 && b.upper == 0.0) {
        lo = hi = mid;
      } else {
        continue;
      }
      resolved = true;
      break;
    }
    if (!resolved) {
      stalled = true;
      break;
    }
  }
  r.s_lo = lo;
  r.s_hi = hi;
  r.s_star = 0.5 * (lo + hi);
  r.converged = !stalled && hi - lo <= tol_s;
  r.at_lo = pressure_bracket(c, lo, r.n_used, &cert);
  r.at_hi = pressure_bracket(c, hi, r.n_used, &cert);
  if (stalled) r.warnings.push_back("brackets at depth <= n_max do not separate from 0; interval is inconclusive");
  return r;
}

BowenResult affinity_dimension(const std::vector<Matrix>& matrices, double tol_s, int n_max) {
  if (matrices.empty()) throw std::invalid_argument("need at least one matrix");
  for (std::size_t i = 0; i < matrices.size(); ++i)
    if (!(operator_norm(matrices[i]) < 1.0))
      throw std::invalid_argument("matrix " + std::to_string(i + 1) + " is not a contraction");
  const Cocycle c(Subshift::full(static_cast<int>(matrices.size())), matrices, 1.0);
  return bowen_root(c, dimension_certificate(c), tol_s, n_max);
}

}  // namespace tfc
