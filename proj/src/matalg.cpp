#include "tfc/matalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tfc {

namespace {

void require_finite(const Matrix& a) {
  if (!a.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
}

void require_square(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw std::invalid_argument("matrix must be square and non-empty");
}

}  // namespace

SingularValueProfile singular_values(const Matrix& a) {
  require_finite(a);
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  return {std::vector<double>(sv.data(), sv.data() + sv.size())};
}

std::vector<double> log_singular_values(const Matrix& a) {
  auto sv = singular_values(a).values;
  if (!(sv.back() > 0.0)) throw std::invalid_argument("matrix is singular");
  for (double& v : sv) v = std::log(v);
  return sv;
}

std::vector<double> scaled_log_singular_values(const Matrix& a, int exp2) {
  auto sv = log_singular_values(a);
  if (exp2 != 0)
    for (double& v : sv) v += exp2 * std::numbers::ln2;
  return sv;
}

double operator_norm(const Matrix& a) { return singular_values(a).values.front(); }

double conorm(const Matrix& a) { return singular_values(a).values.back(); }

double log_phi_from_log_sv(std::span<const double> log_sv, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("phi^s requires s >= 0");
  const auto d = static_cast<double>(log_sv.size());
  if (s > d) {
    double total = 0.0;
    for (double v : log_sv) total += v;
    return (s / d) * total;
  }
  const auto whole = static_cast<std::size_t>(std::floor(s));
  double total = 0.0;
  for (std::size_t i = 0; i < whole; ++i) total += log_sv[i];
  const double frac = s - static_cast<double>(whole);
  if (whole < log_sv.size() && frac > 0.0) total += frac * log_sv[whole];
  return total;
}

double log_phi_s(const Matrix& a, double s) {
  require_square(a);
  return log_phi_from_log_sv(log_singular_values(a), s);
}

double phi_s(const Matrix& a, double s) { return std::exp(log_phi_s(a, s)); }

std::vector<std::vector<int>> exterior_basis(int d, int t) {
  if (t < 1 || t > d) throw std::invalid_argument("exterior index t out of range 1..d");
  std::vector<std::vector<int>> out;
  std::vector<int> idx(t);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    int i = t - 1;
    while (i >= 0 && idx[i] == d - t + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < t; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

Matrix exterior_power(const Matrix& a, int t) {
  require_square(a);
  const int d = static_cast<int>(a.rows());
  const auto basis = exterior_basis(d, t);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Matrix out(n, n);
  Matrix minor(t, t);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j) minor(i, j) = a(basis[r][i], basis[c][j]);
      out(r, c) = minor.determinant();
    }
  return out;
}

EigenReport eigen_report(const Matrix& p, double gap_tol) {
  require_square(p);
  require_finite(p);
  const auto d = p.rows();
  Eigen::EigenSolver<Matrix> solver(p, true);
  const auto vals = solver.eigenvalues();
  const auto vecs = solver.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    const double mx = std::abs(vals[x]), my = std::abs(vals[y]);
    if (mx != my) return mx > my;
    return vals[x].real() > vals[y].real();
  });

  EigenReport report;
  for (auto i : order) report.eigenvalues.push_back(vals[i]);

  bool all_real = true;
  for (const auto& z : report.eigenvalues)
    if (std::abs(z.imag()) > kComplexTol * std::abs(z)) all_real = false;

  report.modulus_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < report.eigenvalues.size(); ++i) {
    const double hi = std::abs(report.eigenvalues[i]);
    const double lo = std::abs(report.eigenvalues[i + 1]);
    report.modulus_gap = std::min(report.modulus_gap, hi > 0.0 ? (hi - lo) / hi : 0.0);
  }
  report.simple_real_distinct_moduli = all_real && report.modulus_gap > gap_tol;
  if (!report.simple_real_distinct_moduli) return report;

  Matrix right(d, d);
  for (Eigen::Index j = 0; j < d; ++j) right.col(j) = vecs.col(order[static_cast<std::size_t>(j)]).real();
  Matrix left = right.inverse();  // rows are the dual basis
  for (Eigen::Index j = 0; j < d; ++j) {
    Vector v = right.col(j).normalized();
    Vector w = left.row(j).transpose().normalized();
    // Deterministic sign: largest-magnitude component of v is positive.
    Eigen::Index k;
    v.cwiseAbs().maxCoeff(&k);
    if (v(k) < 0) v = -v;
    if (v.dot(w) < 0) w = -w;
    report.right_eigenvectors.push_back(v);
    report.left_eigenvectors.push_back(w);
  }
  return report;
}

TopSingularPair top_singular_vectors(const Matrix& a) {
  require_square(a);
  require_finite(a);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  TopSingularPair out;
  out.v = svd.matrixV().col(0);
  Eigen::Index k;
  out.v.cwiseAbs().maxCoeff(&k);
  if (out.v(k) < 0) out.v = -out.v;
  out.u = (a * out.v) / sv(0);
  out.u.normalize();
  out.degenerate = sv.size() > 1 && (sv(0) - sv(1)) <= 1e-9 * sv(0);
  return out;
}

Matrix adjoint(const Matrix& a) { return a.transpose(); }

double spectral_radius(const Matrix& a) {
  require_square(a);
  require_finite(a);
  return Eigen::EigenSolver<Matrix>(a, false).eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace tfc
