#include "tfc/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "tfc/parallel.hpp"

namespace tfc {

namespace {

// Neumaier-compensated sum.
double compensated_sum(const std::vector<double>& xs) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

struct LoggedWords {
  std::vector<Word> words;
  std::vector<double> log_weights;
};

LoggedWords log_weights_over(const Cocycle& c, int n, double s) {
  const auto prefixes = partition_prefixes(c.subshift(), n);
  std::vector<LoggedWords> parts(prefixes.size());
  parallel::run_tasks(prefixes.size(), [&](std::size_t p) {
    for_each_extension(c, prefixes[p], n, [&](const Word& w, const Matrix& product, int exp2) {
      parts[p].words.push_back(w);
      parts[p].log_weights.push_back(log_phi_from_log_sv(scaled_log_singular_values(product, exp2), s));
    });
  });
  LoggedWords out;
  for (auto& part : parts) {
    out.words.insert(out.words.end(), part.words.begin(), part.words.end());
    out.log_weights.insert(out.log_weights.end(), part.log_weights.begin(), part.log_weights.end());
  }
  return out;
}

void normalize(std::vector<double>& weights) {
  const double total = compensated_sum(weights);
  for (double& w : weights) w /= total;
}

// Base-q code of w[pos, pos+len).
std::uint64_t block_code(const Word& w, std::size_t pos, std::size_t len, int q) {
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < len; ++i) code = code * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(w[pos + i]);
  return code;
}

}  // namespace

double CylinderMeasure::weight_of(const Word& w) const {
  auto it = std::lower_bound(words.begin(), words.end(), w);
  if (it == words.end() || *it != w) return 0.0;
  return weights[static_cast<std::size_t>(it - words.begin())];
}

double CylinderMeasure::total() const { return compensated_sum(weights); }

CylinderMeasure gibbs_nu(const Cocycle& c, double s, int n) {
  if (n < 1) throw std::invalid_argument("gibbs_nu: depth must be >= 1");
  if (!(s >= 0.0)) throw std::invalid_argument("gibbs_nu: s must be >= 0");
  auto logged = log_weights_over(c, n, s);
  const double log_alpha = log_sum_exp(logged.log_weights);
  CylinderMeasure mu;
  mu.n = n;
  mu.words = std::move(logged.words);
  mu.weights.reserve(mu.words.size());
  for (double lw : logged.log_weights) mu.weights.push_back(std::exp(lw - log_alpha));
  normalize(mu.weights);
  return mu;
}

CylinderMeasure gibbs_mu(const Cocycle& c, double s, int n, int m) {
  if (m < 1 || m > n) throw std::invalid_argument("gibbs_mu: marginal depth must lie in 1..n");
  const auto nu = gibbs_nu(c, s, n);
  const int q = c.alphabet_size();
  CylinderMeasure mu;
  mu.n = m;
  mu.words = enumerate_words(c.subshift(), m);
  const double dense = std::pow(static_cast<double>(q), m);
  if (dense > 5e7) throw std::invalid_argument("gibbs_mu: marginal depth too large");
  std::vector<std::int64_t> index(static_cast<std::size_t>(dense), -1);
  for (std::size_t i = 0; i < mu.words.size(); ++i)
    index[block_code(mu.words[i], 0, static_cast<std::size_t>(m), q)] = static_cast<std::int64_t>(i);
  std::vector<double> acc(mu.words.size(), 0.0);
  const auto positions = static_cast<std::size_t>(n - m + 1);
  for (std::size_t w = 0; w < nu.words.size(); ++w)
    for (std::size_t i = 0; i < positions; ++i)
      acc[static_cast<std::size_t>(index[block_code(nu.words[w], i, static_cast<std::size_t>(m), q)])] +=
          nu.weights[w];
  for (double& a : acc) a /= static_cast<double>(positions);
  mu.weights = std::move(acc);
  normalize(mu.weights);
  return mu;
}

double shift_invariance_defect(const CylinderMeasure& mu) {
  if (mu.n < 2) throw std::invalid_argument("shift_invariance_defect: needs depth >= 2");
  std::map<Word, double> head, tail;
  for (std::size_t i = 0; i < mu.words.size(); ++i) {
    const Word& w = mu.words[i];
    head[w.slice(0, w.size() - 1)] += mu.weights[i];
    tail[w.slice(1, w.size() - 1)] += mu.weights[i];
  }
  double defect = 0.0;
  for (const auto& [w, v] : head) {
    auto it = tail.find(w);
    defect += std::abs(v - (it == tail.end() ? 0.0 : it->second));
  }
  for (const auto& [w, v] : tail)
    if (!head.count(w)) defect += std::abs(v);
  return defect;
}

GibbsRatios gibbs_ratio_check(const CylinderMeasure& mu, const Cocycle& c, double s, double p_mid) {
  GibbsRatios r;
  r.min_ratio = std::numeric_limits<double>::infinity();
  r.max_ratio = 0.0;
  for (std::size_t i = 0; i < mu.words.size(); ++i) {
    if (!(mu.weights[i] > 0.0)) {
      r.zero_weight.push_back(mu.words[i]);
      continue;
    }
    const double log_ratio = std::log(mu.weights[i]) + mu.n * p_mid - log_phi_word(c, mu.words[i], s);
    const double ratio = std::exp(log_ratio);
    r.min_ratio = std::min(r.min_ratio, ratio);
    r.max_ratio = std::max(r.max_ratio, ratio);
  }
  r.gibbs_constant = std::max(r.max_ratio, 1.0 / r.min_ratio);
  return r;
}

VariationalTerms variational_terms(const Cocycle& c, double s, const CylinderMeasure& mu,
                                   const PressureBracket& bracket) {
  std::vector<double> ent, energy;
  for (std::size_t i = 0; i < mu.words.size(); ++i) {
    const double p = mu.weights[i];
    if (!(p > 0.0)) continue;
    ent.push_back(-p * std::log(p));
    energy.push_back(p * log_phi_word(c, mu.words[i], s));
  }
  VariationalTerms v;
  v.entropy = compensated_sum(ent) / mu.n;
  v.energy = compensated_sum(energy) / mu.n;
  v.gap = bracket.midpoint() - (v.entropy + v.energy);
  return v;
}

double variational_gap(const Cocycle& c, double s, const CylinderMeasure& mu, const PressureBracket& bracket) {
  return variational_terms(c, s, mu, bracket).gap;
}

PressureBracket weighted_pressure(const Cocycle& c, const std::vector<double>& q_vec, const std::vector<int>& t_vec,
                                  int n, const QMCertificate* cert) {
  if (q_vec.empty() || q_vec.size() != t_vec.size())
    throw std::invalid_argument("weighted_pressure: q and t must be non-empty and of equal length");
  for (double qi : q_vec)
    if (!(qi > 0.0)) throw std::invalid_argument("weighted_pressure: weights must be positive");
  for (std::size_t i = 0; i < t_vec.size(); ++i) {
    if (t_vec[i] < 1 || t_vec[i] > c.dim()) throw std::invalid_argument("weighted_pressure: t outside 1..d");
    for (std::size_t j = 0; j < i; ++j)
      if (t_vec[j] == t_vec[i]) throw std::invalid_argument("weighted_pressure: repeated t");
  }
  double exponent = 0.0;
  for (std::size_t i = 0; i < q_vec.size(); ++i) exponent += q_vec[i] * t_vec[i];

  PressureBracket b;
  b.s = exponent;
  b.n = n;
  b.log_alpha = log_partition_sum(c, n, [&](std::span<const double> sv) {
    double acc = 0.0;
    for (std::size_t i = 0; i < q_vec.size(); ++i) acc += q_vec[i] * log_phi_from_log_sv(sv, t_vec[i]);
    return acc;
  });
  b.upper = b.log_alpha / n;
  if (cert != nullptr && cert->c > 0.0 && !cert->failing_pair) {
    double log_c = 0.0;
    for (std::size_t i = 0; i < q_vec.size(); ++i) {
      check_certificate(c, t_vec[i], *cert);
      log_c += q_vec[i] * cert->log_constant_for(t_vec[i]);
    }
    const double log_c1 = exponent * std::log(c.upsilon()) + std::log(static_cast<double>(c.alphabet_size()));
    b.fekete_C = fekete_constant_from_logs(log_c, log_c1, cert->k);
    b.lower = b.upper - *b.fekete_C / n;
  }
  return b;
}

MultifractalPoint multifractal_point(const Cocycle& c, const std::vector<double>& q_vec, const std::vector<int>& t_vec,
                                     int n, const QMCertificate* cert, double fd_step) {
  if (!(fd_step > 0.0)) throw std::invalid_argument("multifractal_point: step must be positive");
  for (double qi : q_vec)
    if (!(qi > fd_step)) throw std::invalid_argument("multifractal_point: q too close to the boundary for the stencil");
  MultifractalPoint pt;
  pt.q_vec = q_vec;
  pt.t_vec = t_vec;
  pt.pressure = weighted_pressure(c, q_vec, t_vec, n, cert);
  const double p0 = pt.pressure.midpoint();
  auto mid_at = [&](std::size_t i, double delta) {
    auto q = q_vec;
    q[i] += delta;
    return weighted_pressure(c, q, t_vec, n, cert).midpoint();
  };
  for (std::size_t i = 0; i < q_vec.size(); ++i) {
    const double h = fd_step;
    const double fp = mid_at(i, h), fm = mid_at(i, -h);
    const double fp2 = mid_at(i, h / 2), fm2 = mid_at(i, -h / 2);
    const double d_h = (fp - fm) / (2 * h);
    const double d_h2 = (fp2 - fm2) / h;
    pt.alpha_vec.push_back((4 * d_h2 - d_h) / 3);
    const double spread = std::abs((fp - p0) / h - (p0 - fm) / h);
    pt.one_sided_spread.push_back(spread);
    if (spread > kKinkTol) pt.gradient_consistent = false;
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < q_vec.size(); ++i) dot += pt.alpha_vec[i] * q_vec[i];
  pt.level_entropy = p0 - dot;
  pt.level_entropy_nonnegative = pt.level_entropy >= -1e-9;
  return pt;
}

}  // namespace tfc
