// Lyapunov exponents of the cocycle: running estimates along itineraries,
// exact values on periodic orbits, periodic spectrum hulls, and concatenation
// witnesses for convex combinations of exponent vectors.
//
// lambda_t is the growth rate of log phi^t, so the vector (lambda_1, .., lambda_d)
// holds cumulative sums of the ordered exponents.

#pragma once

#include <array>
#include <vector>

#include "tfc/certify.hpp"
#include "tfc/cocycle.hpp"

namespace tfc {

/// Product of generators along an itinerary, tracked through each exterior power
/// A^{wedge t}, t = 1..d, so that phi^t = |A^{wedge t}| stays accurate when the singular
/// values separate beyond double precision. Each factor is rescaled by its norm every
/// kRenormalizeEvery steps with the log scale kept separately.
class RunningProduct {
 public:
  static constexpr int kRenormalizeEvery = 16;

  RunningProduct(const Cocycle& c);
  void push(int symbol);
  long steps() const { return steps_; }
  /// log phi^t of the unscaled product, for real t >= 0.
  double log_phi(double t) const;
  /// Log singular values of the unscaled product, as successive differences of log phi^t.
  std::vector<double> log_singular_values() const;

 private:
  double log_phi_index(int t) const;

  const Cocycle* c_;
  /// generator_powers_[t - 1][symbol] = A_symbol^{wedge t}.
  std::vector<std::vector<Matrix>> generator_powers_;
  std::vector<Matrix> products_;
  std::vector<double> log_scales_;
  long steps_ = 0;
};

/// (1/n) log phi^t(A^n(x)) for each t in t_set, from the first n symbols of the itinerary.
std::vector<double> pointwise_exponents(const Cocycle& c, const std::vector<int>& itinerary, int n,
                                        const std::vector<int>& t_set);

/// lambda_t = (1/|I|) log rho(A(I)^{wedge t}), t = 1..d.
std::vector<double> periodic_exponents(const Cocycle& c, const Word& period);

/// Least rotation of a word.
Word minimal_rotation(const Word& w);

struct Hull {
  /// Dimension of the affine span of the points (tolerance kHullTol).
  int affine_dim = 0;
  /// Indices into the point list, ascending.
  std::vector<std::size_t> vertices;
  /// Triangular facets as vertex index triples (affine_dim == 3 only).
  std::vector<std::array<std::size_t, 3>> facets;
  /// False when the affine dimension exceeds 3; vertices are then left empty.
  bool computed = true;
};

constexpr double kHullTol = 1e-9;

/// Vertices of the convex hull of points in R^d (affine dimension up to 3).
Hull convex_hull(const std::vector<Vector>& points);

struct SpectrumSample {
  std::vector<Vector> points;
  /// Minimal-rotation representative of each periodic orbit.
  std::vector<Word> sources;
  Hull hull;
};

/// Exponent vectors of every periodic orbit with least period <= max_period, one per
/// orbit (primitive minimal-rotation words), and their convex hull (an inner approximation of the spectrum).
SpectrumSample spectrum_hull(const Cocycle& c, int max_period);

struct WitnessTracePoint {
  long m = 0;
  std::vector<double> values;  // (1/m) log phi^t for t = 1..d
};

struct ConvexityWitness {
  std::vector<int> itinerary;
  std::vector<WitnessTracePoint> trace;
  std::vector<double> final_values;
  /// gamma lambda(x) + (1 - gamma) lambda(y).
  std::vector<double> target;
  /// Number of blocks placed (including a truncated last block).
  int blocks = 0;
};

/// Concatenates N_i copies of the length-i prefix of x^infinity (i odd) or of y^infinity
/// (i even), N_i = floor(gamma i) for odd i and floor((1 - gamma) i) for even i, joining
/// consecutive blocks with the certificate's connecting word for (suffix of the left
/// block, prefix of the right block), each cut to the certificate horizon. The result is
/// truncated to prefix_len symbols and the running exponents are sampled every
/// trace_stride symbols. Throws std::invalid_argument naming the junction when the
/// certificate has no word for it.
ConvexityWitness convexity_witness(const Cocycle& c, const Word& x_word, const Word& y_word, double gamma,
                                   const QMCertificate& cert, long prefix_len, long trace_stride = 100);

}  // namespace tfc
