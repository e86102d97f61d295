// Subadditive pressure of the singular value potential: partition sums alpha_n^s,
// certified brackets, pressure curves, and Bowen-equation roots.

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tfc/certify.hpp"
#include "tfc/cocycle.hpp"

namespace tfc {

struct PressureBracket {
  double s = 0.0;
  int n = 0;
  /// (1/n) log alpha_n^s; never below the pressure.
  double upper = 0.0;
  /// upper - C/n; absent without a usable certificate.
  std::optional<double> lower;
  /// Almost-superadditivity constant C; absent together with `lower`.
  std::optional<double> fekete_C;
  double log_alpha = 0.0;

  bool certified() const { return lower.has_value(); }
  /// Bracket centre, or the upper bound for one-sided brackets.
  double midpoint() const { return lower ? 0.5 * (*lower + upper) : upper; }
};

/// log sum_i exp(x_i) with a two-pass max shift; -inf for an empty input.
double log_sum_exp(std::span<const double> xs);

/// log sum_{I in L(n)} exp(log_weight(log singular values of A(I))).
/// Words are split by partition_prefixes; each partition is reduced with a two-pass
/// max-shifted sum and partitions are merged in prefix order, so the value does not
/// depend on the thread count.
double log_partition_sum(const Cocycle& c, int n, const std::function<double(std::span<const double>)>& log_weight);

double log_alpha_n(const Cocycle& c, double s, int n);
double pressure_upper(const Cocycle& c, double s, int n);

/// C = log(c^{-1} sum_{i=0}^{k} C1^i) from the logs of c and C1.
double fekete_constant_from_logs(double log_c, double log_c1, int k);
/// C at parameter s with C1 = Upsilon^s q and c from the certificate.
double fekete_constant(const Cocycle& c, double s, const QMCertificate& cert);

/// Checks that `cert` belongs to `c` and covers s; throws std::invalid_argument otherwise.
void check_certificate(const Cocycle& c, double s, const QMCertificate& cert);

double pressure_lower(const Cocycle& c, double s, int n, const QMCertificate& cert);

/// One-sided (upper only) when cert is null or has c = 0.
PressureBracket pressure_bracket(const Cocycle& c, double s, int n, const QMCertificate* cert);

std::vector<PressureBracket> pressure_curve(const Cocycle& c, const QMCertificate* cert,
                                            const std::vector<double>& s_grid, int n);

/// Lipschitz constant of s -> P(s): max(log Upsilon, -log varrho).
double pressure_lipschitz_constant(const Cocycle& c);

/// Depth schedule used by root finding.
inline constexpr int kDepthSchedule[] = {4, 6, 8, 10, 12};

struct BowenResult {
  double s_star = 0.0;
  /// Final s-interval; the root lies in [s_lo, s_hi].
  double s_lo = 0.0;
  double s_hi = 0.0;
  bool converged = false;
  /// Zero topological entropy: the root is the boundary point s = 0.
  bool degenerate = false;
  /// The deepest depth used.
  int n_used = 0;
  /// Brackets at the interval ends. P is decreasing, so
  /// [at_hi.lower, at_lo.upper] contains P(s) for every s in [s_lo, s_hi] and contains 0.
  PressureBracket at_lo;
  PressureBracket at_hi;
  std::vector<std::string> warnings;

  double root_lower() const { return at_hi.lower.value_or(at_hi.upper); }
  double root_upper() const { return at_lo.upper; }
};

constexpr double kDefaultTolS = 1e-6;

/// Bisection on [0, 2d] driven by certified brackets. A step resolves only when the
/// bracket at the midpoint excludes 0; otherwise the depth is raised through
/// kDepthSchedule up to n_max. When no depth resolves, the result is returned with
/// converged = false and the achieved interval.
BowenResult bowen_root(const Cocycle& c, const QMCertificate& cert, double tol_s = kDefaultTolS, int n_max = 12);

/// Certificate used for dimension computations: integer indices 1..d at the given
/// horizon, extended to real s.
QMCertificate dimension_certificate(const Cocycle& c, int horizon_L = 4, int k_max = 2);

/// Bowen root of the full-shift cocycle generated by `matrices`. Rejects non-contractions.
BowenResult affinity_dimension(const std::vector<Matrix>& matrices, double tol_s = kDefaultTolS, int n_max = 12);

}  // namespace tfc
