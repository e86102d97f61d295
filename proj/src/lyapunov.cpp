#include "tfc/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "tfc/parallel.hpp"

namespace tfc {

RunningProduct::RunningProduct(const Cocycle& c) : c_(&c) {
  const int d = c.dim();
  for (int t = 1; t <= d; ++t) {
    std::vector<Matrix> powers;
    for (const auto& g : c.generators()) powers.push_back(t == 1 ? g : exterior_power(g, t));
    products_.push_back(Matrix::Identity(powers.front().rows(), powers.front().cols()));
    generator_powers_.push_back(std::move(powers));
  }
  log_scales_.assign(static_cast<std::size_t>(d), 0.0);
}

void RunningProduct::push(int symbol) {
  ++steps_;
  const bool renormalize = steps_ % kRenormalizeEvery == 0;
  for (std::size_t i = 0; i < products_.size(); ++i) {
    products_[i] = generator_powers_[i][static_cast<std::size_t>(symbol)] * products_[i];
    if (renormalize) {
      const double nrm = operator_norm(products_[i]);
      if (!(nrm > 0.0)) throw std::invalid_argument("running product became singular");
      products_[i] /= nrm;
      log_scales_[i] += std::log(nrm);
    }
  }
}

double RunningProduct::log_phi_index(int t) const {
  if (t == 0) return 0.0;
  const auto i = static_cast<std::size_t>(t - 1);
  const double nrm = operator_norm(products_[i]);
  if (!(nrm > 0.0)) throw std::invalid_argument("matrix is singular");
  return std::log(nrm) + log_scales_[i];
}

std::vector<double> RunningProduct::log_singular_values() const {
  std::vector<double> sv;
  double prev = 0.0;
  for (int t = 1; t <= c_->dim(); ++t) {
    const double cur = log_phi_index(t);
    sv.push_back(cur - prev);
    prev = cur;
  }
  return sv;
}

double RunningProduct::log_phi(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("log_phi: t must be >= 0");
  const int d = c_->dim();
  if (t >= d) return t / d * log_phi_index(d);
  const int lo = static_cast<int>(std::floor(t));
  const double f = t - lo;
  return f == 0.0 ? log_phi_index(lo) : (1.0 - f) * log_phi_index(lo) + f * log_phi_index(lo + 1);
}

std::vector<double> pointwise_exponents(const Cocycle& c, const std::vector<int>& itinerary, int n,
                                        const std::vector<int>& t_set) {
  if (n < 1) throw std::invalid_argument("pointwise_exponents: horizon must be >= 1");
  if (static_cast<long>(itinerary.size()) < n) throw std::invalid_argument("pointwise_exponents: itinerary shorter than n");
  for (int t : t_set)
    if (t < 0 || t > c.dim()) throw std::invalid_argument("pointwise_exponents: t outside 0..d");
  for (int i = 0; i < n; ++i) {
    const int sym = itinerary[static_cast<std::size_t>(i)];
    if (sym < 0 || sym >= c.alphabet_size())
      throw std::invalid_argument("itinerary symbol out of range at index " + std::to_string(i));
    if (i > 0 && !c.subshift().allowed(itinerary[static_cast<std::size_t>(i - 1)], sym))
      throw std::invalid_argument("itinerary is inadmissible at index " + std::to_string(i));
  }
  RunningProduct prod(c);
  for (int i = 0; i < n; ++i) prod.push(itinerary[static_cast<std::size_t>(i)]);
  std::vector<double> out;
  for (int t : t_set) out.push_back(prod.log_phi(t) / n);
  return out;
}

std::vector<double> periodic_exponents(const Cocycle& c, const Word& period) {
  if (period.empty()) throw std::invalid_argument("periodic word must be non-empty");
  if (!c.subshift().is_cyclically_admissible(period))
    throw std::invalid_argument("word " + period.str() + " is not cyclically admissible");
  const Matrix p = evaluate_word(c, period);
  const double len = static_cast<double>(period.size());
  std::vector<double> out;
  for (int t = 1; t <= c.dim(); ++t) {
    const double rho = t == 1 ? spectral_radius(p) : spectral_radius(exterior_power(p, t));
    out.push_back(std::log(rho) / len);
  }
  return out;
}

Word minimal_rotation(const Word& w) {
  Word best = w;
  for (std::size_t r = 1; r < w.size(); ++r) {
    Word rot;
    rot.symbols.assign(w.symbols.begin() + static_cast<std::ptrdiff_t>(r), w.symbols.end());
    rot.symbols.insert(rot.symbols.end(), w.symbols.begin(), w.symbols.begin() + static_cast<std::ptrdiff_t>(r));
    best = std::min(best, rot);
  }
  return best;
}

namespace {

using Vec3 = Eigen::Vector3d;

std::vector<std::size_t> hull_2d(const std::vector<Eigen::Vector2d>& pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a].x() != pts[b].x()) return pts[a].x() < pts[b].x();
    if (pts[a].y() != pts[b].y()) return pts[a].y() < pts[b].y();
    return a < b;
  });
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    const Eigen::Vector2d u = pts[a] - pts[o], v = pts[b] - pts[o];
    return u.x() * v.y() - u.y() * v.x();
  };
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = kHullTol * std::max(1.0, scale * scale);
  std::vector<std::size_t> chain(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i : order) {
    while (k >= 2 && cross(chain[k - 2], chain[k - 1], i) <= eps) --k;
    chain[k++] = i;
  }
  for (std::size_t idx = order.size() - 1, lower = k + 1; idx-- > 0;) {
    const std::size_t i = order[idx];
    while (k >= lower && cross(chain[k - 2], chain[k - 1], i) <= eps) --k;
    chain[k++] = i;
  }
  chain.resize(k > 1 ? k - 1 : k);
  return chain;
}

struct Face {
  std::array<std::size_t, 3> v;
  Vec3 normal;
  double offset;
};

Face make_face(const std::vector<Vec3>& pts, std::size_t a, std::size_t b, std::size_t c, const Vec3& inside) {
  Face f{{a, b, c}, (pts[b] - pts[a]).cross(pts[c] - pts[a]), 0.0};
  if (f.normal.dot(inside - pts[a]) > 0) {
    std::swap(f.v[1], f.v[2]);
    f.normal = -f.normal;
  }
  f.normal.normalize();
  f.offset = f.normal.dot(pts[f.v[0]]);
  return f;
}

std::vector<Face> hull_3d(const std::vector<Vec3>& pts) {
  const std::size_t n = pts.size();
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = kHullTol * std::max(1.0, scale);

  std::size_t i0 = 0, i1 = 0, i2 = 0, i3 = 0;
  for (std::size_t i = 0; i < n; ++i)
    if ((pts[i] - pts[i0]).norm() > (pts[i1] - pts[i0]).norm()) i1 = i;
  const Vec3 dir = (pts[i1] - pts[i0]).normalized();
  double best = -1;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 r = pts[i] - pts[i0];
    const double dist = (r - r.dot(dir) * dir).norm();
    if (dist > best) best = dist, i2 = i;
  }
  const Vec3 nrm = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  best = -1;
  for (std::size_t i = 0; i < n; ++i) {
    const double dist = std::abs(nrm.dot(pts[i] - pts[i0]));
    if (dist > best) best = dist, i3 = i;
  }
  const Vec3 inside = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
  std::vector<Face> faces{make_face(pts, i0, i1, i2, inside), make_face(pts, i0, i1, i3, inside),
                          make_face(pts, i0, i2, i3, inside), make_face(pts, i1, i2, i3, inside)};

  for (std::size_t p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<bool> visible(faces.size(), false);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (faces[f].normal.dot(pts[p]) - faces[f].offset > eps) visible[f] = any = true;
    if (!any) continue;
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (visible[f])
        for (int e = 0; e < 3; ++e) edges.emplace(faces[f].v[e], faces[f].v[(e + 1) % 3]);
    std::vector<Face> next;
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (!visible[f]) next.push_back(faces[f]);
    for (const auto& [a, b] : edges)
      if (!edges.count({b, a})) next.push_back(make_face(pts, a, b, p, inside));
    faces = std::move(next);
  }
  return faces;
}

}  // namespace

Hull convex_hull(const std::vector<Vector>& points) {
  Hull h;
  if (points.empty()) return h;
  const auto d = points.front().size();
  const auto n = static_cast<Eigen::Index>(points.size());
  Vector centroid = Vector::Zero(d);
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(n);
  Matrix centered(n, d);
  for (Eigen::Index i = 0; i < n; ++i) centered.row(i) = (points[static_cast<std::size_t>(i)] - centroid).transpose();
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double scale = 1.0;
  for (const auto& p : points) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  h.affine_dim = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > kHullTol * scale) ++h.affine_dim;
  const Matrix basis = svd.matrixV().leftCols(h.affine_dim);
  const Matrix coords = centered * basis;

  switch (h.affine_dim) {
    case 0:
      h.vertices = {0};
      break;
    case 1: {
      Eigen::Index lo = 0, hi = 0;
      for (Eigen::Index i = 1; i < n; ++i) {
        if (coords(i, 0) < coords(lo, 0)) lo = i;
        if (coords(i, 0) > coords(hi, 0)) hi = i;
      }
      h.vertices = {static_cast<std::size_t>(std::min(lo, hi)), static_cast<std::size_t>(std::max(lo, hi))};
      break;
    }
    case 2: {
      std::vector<Eigen::Vector2d> pts;
      for (Eigen::Index i = 0; i < n; ++i) pts.emplace_back(coords(i, 0), coords(i, 1));
      h.vertices = hull_2d(pts);
      std::sort(h.vertices.begin(), h.vertices.end());
      break;
    }
    case 3: {
      std::vector<Vec3> pts;
      for (Eigen::Index i = 0; i < n; ++i) pts.emplace_back(coords(i, 0), coords(i, 1), coords(i, 2));
      std::set<std::size_t> used;
      for (const auto& f : hull_3d(pts)) {
        h.facets.push_back(f.v);
        used.insert(f.v.begin(), f.v.end());
      }
      h.vertices.assign(used.begin(), used.end());
      break;
    }
    default:
      h.computed = false;
  }
  return h;
}

namespace {

/// Not a proper power of a shorter word.
bool is_primitive(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = w[i] == w[i - p];
    if (periodic) return false;
  }
  return true;
}

}  // namespace

SpectrumSample spectrum_hull(const Cocycle& c, int max_period) {
  if (max_period < 1) throw std::invalid_argument("spectrum_hull: max period must be >= 1");
  SpectrumSample out;
  for (auto& w : enumerate_words_up_to(c.subshift(), max_period))
    if (c.subshift().is_cyclically_admissible(w) && is_primitive(w) && minimal_rotation(w) == w)
      out.sources.push_back(std::move(w));
  out.points.resize(out.sources.size());
  parallel::run_tasks(out.sources.size(), [&](std::size_t i) {
    const auto lam = periodic_exponents(c, out.sources[i]);
    out.points[i] = Eigen::Map<const Vector>(lam.data(), static_cast<Eigen::Index>(lam.size()));
  });
  out.hull = convex_hull(out.points);
  return out;
}

ConvexityWitness convexity_witness(const Cocycle& c, const Word& x_word, const Word& y_word, double gamma,
                                   const QMCertificate& cert, long prefix_len, long trace_stride) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("convexity_witness: gamma must lie in [0,1]");
  if (prefix_len < 1) throw std::invalid_argument("convexity_witness: prefix length must be >= 1");
  if (trace_stride < 1) throw std::invalid_argument("convexity_witness: trace stride must be >= 1");
  const auto lx = periodic_exponents(c, x_word);
  const auto ly = periodic_exponents(c, y_word);
  if (!cert.words_retained) throw std::invalid_argument("convexity_witness: certificate carries no connecting words");
  if (cert.cocycle_fingerprint != 0 && cert.cocycle_fingerprint != c.fingerprint())
    throw std::invalid_argument("convexity_witness: certificate was issued for a different cocycle");

  ConvexityWitness w;
  for (std::size_t t = 0; t < lx.size(); ++t) w.target.push_back(gamma * lx[t] + (1.0 - gamma) * ly[t]);

  auto block_of = [](const Word& base, long len) {
    Word b;
    for (long j = 0; j < len; ++j) b.symbols.push_back(base[static_cast<std::size_t>(j) % base.size()]);
    return b;
  };
  const auto horizon = static_cast<std::size_t>(cert.horizon_L);
  std::optional<Word> prev;
  const auto target_len = static_cast<std::size_t>(prefix_len);
  for (long i = 1; w.itinerary.size() < target_len; ++i) {
    const long copies = static_cast<long>(std::floor((i % 2 == 1 ? gamma : 1.0 - gamma) * static_cast<double>(i)));
    const Word block = block_of(i % 2 == 1 ? x_word : y_word, i);
    for (long r = 0; r < copies && w.itinerary.size() < target_len; ++r) {
      if (prev) {
        const std::size_t ls = std::min(horizon, prev->size());
        const std::size_t rp = std::min(horizon, block.size());
        const auto key = std::make_pair(prev->slice(prev->size() - ls, ls), block.slice(0, rp));
        auto it = cert.connecting_words.find(key);
        if (it == cert.connecting_words.end())
          throw std::invalid_argument("convexity_witness: no connecting word for junction " + std::to_string(w.blocks) +
                                      " (" + key.first.str() + " | " + key.second.str() + ")");
        w.itinerary.insert(w.itinerary.end(), it->second.symbols.begin(), it->second.symbols.end());
      }
      w.itinerary.insert(w.itinerary.end(), block.symbols.begin(), block.symbols.end());
      prev = block;
      ++w.blocks;
    }
    if (i > 10 * prefix_len + 10) throw std::invalid_argument("convexity_witness: schedule places no blocks");
  }
  w.itinerary.resize(target_len);

  RunningProduct prod(c);
  for (std::size_t m = 0; m < w.itinerary.size(); ++m) {
    prod.push(w.itinerary[m]);
    const long steps = prod.steps();
    if (steps % trace_stride == 0 || m + 1 == w.itinerary.size()) {
      WitnessTracePoint tp;
      tp.m = steps;
      for (int t = 1; t <= c.dim(); ++t) tp.values.push_back(prod.log_phi(t) / static_cast<double>(steps));
      w.trace.push_back(std::move(tp));
    }
  }
  w.final_values = w.trace.back().values;
  return w;
}

}  // namespace tfc
