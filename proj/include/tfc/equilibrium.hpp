// Finite-depth Gibbs approximants, Gibbs-ratio and variational checks, weighted
// (multifractal) pressure, pressure gradients and level-set entropy.

#pragma once

#include <optional>
#include <vector>

#include "tfc/pressure.hpp"

namespace tfc {

/// Probability weights on L(n), words in lexicographic order.
struct CylinderMeasure {
  int n = 0;
  std::vector<Word> words;
  std::vector<double> weights;

  /// 0 for words outside the support.
  double weight_of(const Word& w) const;
  double total() const;
};

/// nu_n(I) = phi^s(I) / alpha_n^s.
CylinderMeasure gibbs_nu(const Cocycle& c, double s, int n);

/// Depth-m marginal of the average of f^i_* nu_n over the n - m + 1 positions
/// i = 0..n-m at which a full m-block is visible.
CylinderMeasure gibbs_mu(const Cocycle& c, double s, int n, int m);

/// || mu(I) - sum_a mu(aI) ||_1 over I in L(m-1), where mu(I) is read as sum_a mu(Ia).
double shift_invariance_defect(const CylinderMeasure& mu);

struct GibbsRatios {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  /// max(max_ratio, 1 / min_ratio).
  double gibbs_constant = 0.0;
  std::vector<Word> zero_weight;
};

/// Extremal mu(I) / (exp(-m P_mid) phi^s(I)) over the support of mu.
GibbsRatios gibbs_ratio_check(const CylinderMeasure& mu, const Cocycle& c, double s, double p_mid);

struct VariationalTerms {
  double entropy = 0.0;  // (1/m) H_m(mu)
  double energy = 0.0;   // (1/m) sum mu(I) log phi^s(I)
  double gap = 0.0;      // bracket midpoint - (entropy + energy)
};

VariationalTerms variational_terms(const Cocycle& c, double s, const CylinderMeasure& mu,
                                   const PressureBracket& bracket);
double variational_gap(const Cocycle& c, double s, const CylinderMeasure& mu, const PressureBracket& bracket);

/// Bracket for P(sum_i q_i Phi^{t_i}). Fekete constant uses C1 = Upsilon^{sum q_i t_i} q and
/// log c = sum_i q_i log c_{t_i}. With d = 1, q = (s), t = (1) this equals pressure_bracket(s).
PressureBracket weighted_pressure(const Cocycle& c, const std::vector<double>& q_vec, const std::vector<int>& t_vec,
                                  int n, const QMCertificate* cert);

constexpr double kDefaultFdStep = 1e-4;
/// One-sided difference quotients further apart than this flag a possible kink.
constexpr double kKinkTol = 1e-3;

struct MultifractalPoint {
  std::vector<double> q_vec;
  std::vector<int> t_vec;
  PressureBracket pressure;
  /// Gradient of the bracket midpoint (central differences with one Richardson step).
  std::vector<double> alpha_vec;
  /// pressure.midpoint() - alpha . q
  double level_entropy = 0.0;
  /// Per coordinate: |forward - backward| difference quotient.
  std::vector<double> one_sided_spread;
  bool gradient_consistent = true;
  bool level_entropy_nonnegative = true;
};

MultifractalPoint multifractal_point(const Cocycle& c, const std::vector<double>& q_vec, const std::vector<int>& t_vec,
                                     int n, const QMCertificate* cert, double fd_step = kDefaultFdStep);

}  // namespace tfc
