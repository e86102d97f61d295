// Dense small-matrix kernels: singular values, the singular value function,
// exterior powers, eigen reports, top singular vectors.

#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tfc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Singular values in non-increasing order.
struct SingularValueProfile {
  std::vector<double> values;
};

/// Throws std::invalid_argument on non-finite entries.
SingularValueProfile singular_values(const Matrix& a);

/// Natural logs of the singular values. Throws if A is singular.
std::vector<double> log_singular_values(const Matrix& a);
/// Log singular values of a * 2^exp2.
std::vector<double> scaled_log_singular_values(const Matrix& a, int exp2);

double operator_norm(const Matrix& a);
/// Smallest singular value m(A).
double conorm(const Matrix& a);

/// log phi^s from log singular values (non-increasing). Requires s >= 0.
///   s <= d : sum_{i < floor s} log a_i + (s - floor s) log a_{floor s}
///   s >  d : (s/d) sum_i log a_i
double log_phi_from_log_sv(std::span<const double> log_sv, double s);

/// phi^s(A). Singular A is rejected.
double phi_s(const Matrix& a, double s);
double log_phi_s(const Matrix& a, double s);

/// Index tuples i_1 < ... < i_t in lexicographic order (0-based).
std::vector<std::vector<int>> exterior_basis(int d, int t);

/// Matrix of A^{wedge t}: entry (I, J) is the t x t minor with rows I and columns J.
Matrix exterior_power(const Matrix& a, int t);

struct EigenReport {
  std::vector<std::complex<double>> eigenvalues;  // non-increasing modulus
  std::vector<Vector> right_eigenvectors;         // only when simple_real_distinct_moduli
  std::vector<Vector> left_eigenvectors;          // w_j orthogonal to span{v_i : i != j}
  bool simple_real_distinct_moduli = false;
  double modulus_gap = 0.0;  // min over i of (|l_i| - |l_{i+1}|) / |l_i|; +inf when d == 1
};

constexpr double kDefaultGapTol = 1e-8;
constexpr double kComplexTol = 1e-10;

EigenReport eigen_report(const Matrix& p, double gap_tol = kDefaultGapTol);

/// Unit vectors with ||A|| u = A v. `degenerate` when a_1 and a_2 agree to 1e-9 relative.
struct TopSingularPair {
  Vector u;
  Vector v;
  bool degenerate = false;
};

TopSingularPair top_singular_vectors(const Matrix& a);

Matrix adjoint(const Matrix& a);

/// Largest eigenvalue modulus.
double spectral_radius(const Matrix& a);

}  // namespace tfc
