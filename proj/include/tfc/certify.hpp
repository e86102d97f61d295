// Irreducibility, typicality (pinching and twisting on exterior powers) and
// quasi-multiplicativity certificates.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tfc/cocycle.hpp"

namespace tfc {

struct IrreducibilityResult {
  bool irreducible_over_c = false;
  int algebra_dim = 0;
};

/// Dimension of the span of all generator products of length <= d^2 (identity included).
/// Irreducible over C iff that span is all of M_d (Burnside).
IrreducibilityResult irreducibility(const Cocycle& c);

struct PinchingVerdict {
  int t = 0;
  bool pass = false;
  double modulus_gap = 0.0;
};

/// P = A(p_word); verdict t compares the moduli of P^{wedge t} for t = 1..d-1.
std::vector<PinchingVerdict> pinching_check(const Cocycle& c, const Word& p_word, double gap_tol = kDefaultGapTol);

enum class Verdict { kPass, kFail, kInconclusive };
std::string to_string(Verdict v);

constexpr double kDefaultZeroTol = 1e-10;
/// Coefficients in [zero_tol, kInconclusiveFactor * zero_tol) are reported as inconclusive.
constexpr double kInconclusiveFactor = 100.0;

struct TwistingVerdict {
  int t = 0;
  Verdict verdict = Verdict::kFail;
  double min_abs_coefficient = 0.0;
  /// Row i holds the coordinates of psi^{wedge t} v_i in the eigenbasis, scaled to unit max.
  Matrix coefficients;
};

/// Requires pinching at every t; throws std::invalid_argument otherwise.
std::vector<TwistingVerdict> twisting_check(const Cocycle& c, const Word& p_word, const HomoclinicSpec& h,
                                            double zero_tol = kDefaultZeroTol, double gap_tol = kDefaultGapTol);

struct TypicalityReport {
  Word p_word;
  HomoclinicSpec homoclinic;
  double gap_tol = kDefaultGapTol;
  double zero_tol = kDefaultZeroTol;
  std::vector<PinchingVerdict> pinching;
  std::vector<TwistingVerdict> twisting;  // empty when pinching fails
  std::vector<PinchingVerdict> adjoint_pinching;
  std::vector<TwistingVerdict> adjoint_twisting;
  bool adjoint_agrees = true;
  bool typical = false;
};

TypicalityReport typicality_report(const Cocycle& c, const HomoclinicSpec& h, double gap_tol = kDefaultGapTol,
                                   double zero_tol = kDefaultZeroTol);

/// Connecting words are retained only up to this many pairs.
constexpr std::size_t kMaxRetainedPairs = 100000;
/// Upper bound on pair x candidate evaluations in one search.
constexpr double kSearchBudget = 5e7;

struct QMCertificate {
  /// min over checked pairs and covered t of phi^t(IKJ) / (phi^t(I) phi^t(J)).
  double c = 0.0;
  int k = 0;
  int horizon_L = 0;
  int k_max = 0;
  int dim = 0;
  std::vector<int> t_set;
  /// Same order as t_set; each entry uses the one chosen K per pair.
  std::vector<double> c_per_t;
  bool exhaustive = false;
  bool words_retained = false;
  std::map<std::pair<Word, Word>, Word> connecting_words;
  /// Pair attaining c (lexicographically first on ties).
  std::optional<std::pair<Word, Word>> argmin_pair;
  /// First pair with no admissible K within k_max; c is 0 when present.
  std::optional<std::pair<Word, Word>> failing_pair;
  /// Valid for every real s >= 0 by interpolation between integer indices.
  bool real_s = false;
  std::string derivation;
  std::uint64_t cocycle_fingerprint = 0;

  bool covers(double s) const;
  /// log of the constant valid for phi^s; throws when s is not covered or c is 0.
  double log_constant_for(double s) const;
};

QMCertificate qm_search(const Cocycle& c, const std::vector<int>& t_set, int horizon_L, int k_max);

/// Requires every t in 1..d (t = 0 holds with constant 1 since phi^0 = 1).
/// phi^{n+f} = (phi^n)^{1-f} (phi^{n+1})^f exactly, so c_s = c_n^{1-f} c_{n+1}^f, and
/// phi^s = (phi^d)^{s/d} beyond d gives c_s = c_d^{s/d}.
QMCertificate extend_certificate_to_s(const QMCertificate& cert);

/// Ratio min_t phi^t(IKJ)/(phi^t(I)phi^t(J)) over t in t_set, by direct evaluation.
double qm_ratio(const Cocycle& c, const Word& i, const Word& k, const Word& j, const std::vector<double>& s_values);

nlohmann::json to_json(const QMCertificate& cert);
/// Throws std::invalid_argument with a JSON-pointer path on schema violations.
QMCertificate certificate_from_json(const nlohmann::json& j, int q);

}  // namespace tfc
