#include "tfc/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "tfc/parallel.hpp"

namespace tfc {

namespace {

constexpr double kSpanTol = 1e-10;

// Gram-Schmidt residual of `m` (flattened) against an orthonormal list.
Vector span_residual(const std::vector<Vector>& basis, const Matrix& m) {
  Vector v = Eigen::Map<const Vector>(m.data(), m.size());
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) v -= b.dot(v) * b;
  return v;
}

bool is_integer_index(double s) { return s == std::floor(s); }

}  // namespace

IrreducibilityResult irreducibility(const Cocycle& c) {
  const int d = c.dim();
  const int max_len = d * d;
  std::vector<Vector> basis;
  std::vector<Matrix> frontier;
  const Matrix id = Matrix::Identity(d, d);
  basis.push_back(Eigen::Map<const Vector>(id.data(), id.size()).normalized());
  frontier.push_back(id / id.norm());
  for (int len = 1; len <= max_len && !frontier.empty() && static_cast<int>(basis.size()) < d * d; ++len) {
    std::vector<Matrix> next;
    for (const auto& m : frontier)
      for (const auto& g : c.generators()) {
        Matrix prod = g * m;
        prod /= prod.norm();
        Vector r = span_residual(basis, prod);
        if (r.norm() > kSpanTol) {
          basis.push_back(r.normalized());
          next.push_back(prod);
        }
      }
    frontier = std::move(next);
  }
  IrreducibilityResult out;
  out.algebra_dim = static_cast<int>(basis.size());
  out.irreducible_over_c = out.algebra_dim == d * d;
  return out;
}

std::vector<PinchingVerdict> pinching_check(const Cocycle& c, const Word& p_word, double gap_tol) {
  if (p_word.empty()) throw std::invalid_argument("periodic word must be non-empty");
  if (!c.subshift().is_cyclically_admissible(p_word))
    throw std::invalid_argument("periodic word " + p_word.str() + " is not cyclically admissible");
  const Matrix p = evaluate_word(c, p_word);
  std::vector<PinchingVerdict> out;
  for (int t = 1; t < c.dim(); ++t) {
    const auto rep = eigen_report(t == 1 ? p : exterior_power(p, t), gap_tol);
    out.push_back({t, rep.simple_real_distinct_moduli, rep.modulus_gap});
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "fail";
}

std::vector<TwistingVerdict> twisting_check(const Cocycle& c, const Word& p_word, const HomoclinicSpec& h,
                                            double zero_tol, double gap_tol) {
  if (h.p_word != p_word) throw std::invalid_argument("homoclinic orbit is based at a different periodic word");
  for (const auto& v : pinching_check(c, p_word, gap_tol))
    if (!v.pass)
      throw std::invalid_argument("pinching fails at t=" + std::to_string(v.t) + "; eigenbasis undefined for twisting");
  const Matrix p = evaluate_word(c, p_word);
  const Matrix psi = holonomy_loop(c, h);
  std::vector<TwistingVerdict> out;
  for (int t = 1; t < c.dim(); ++t) {
    const Matrix pt = t == 1 ? p : exterior_power(p, t);
    const Matrix psit = t == 1 ? psi : exterior_power(psi, t);
    const auto rep = eigen_report(pt, gap_tol);
    const auto n = static_cast<Eigen::Index>(rep.right_eigenvectors.size());
    Matrix coef(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector image = psit * rep.right_eigenvectors[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto& w = rep.left_eigenvectors[static_cast<std::size_t>(j)];
        coef(i, j) = w.dot(image) / w.dot(rep.right_eigenvectors[static_cast<std::size_t>(j)]);
      }
      const double row_max = coef.row(i).cwiseAbs().maxCoeff();
      if (row_max > 0.0) coef.row(i) /= row_max;
    }
    TwistingVerdict v;
    v.t = t;
    v.min_abs_coefficient = coef.cwiseAbs().minCoeff();
    if (v.min_abs_coefficient < zero_tol)
      v.verdict = Verdict::kFail;
    else if (v.min_abs_coefficient < kInconclusiveFactor * zero_tol)
      v.verdict = Verdict::kInconclusive;
    else
      v.verdict = Verdict::kPass;
    v.coefficients = std::move(coef);
    out.push_back(std::move(v));
  }
  return out;
}

TypicalityReport typicality_report(const Cocycle& c, const HomoclinicSpec& h, double gap_tol, double zero_tol) {
  h.validate(c.subshift());
  TypicalityReport r;
  r.p_word = h.p_word;
  r.homoclinic = h;
  r.gap_tol = gap_tol;
  r.zero_tol = zero_tol;

  auto evaluate = [&](const Cocycle& cc, const HomoclinicSpec& hh, std::vector<PinchingVerdict>& pin,
                      std::vector<TwistingVerdict>& tw) {
    pin = pinching_check(cc, hh.p_word, gap_tol);
    const bool pinched = std::all_of(pin.begin(), pin.end(), [](const auto& v) { return v.pass; });
    if (pinched) tw = twisting_check(cc, hh.p_word, hh, zero_tol, gap_tol);
    return pinched &&
           std::all_of(tw.begin(), tw.end(), [](const auto& v) { return v.verdict == Verdict::kPass; });
  };

  r.typical = evaluate(c, h, r.pinching, r.twisting);
  const Cocycle adj = adjoint_cocycle(c);
  evaluate(adj, adjoint_homoclinic(h), r.adjoint_pinching, r.adjoint_twisting);

  r.adjoint_agrees = r.pinching.size() == r.adjoint_pinching.size() && r.twisting.size() == r.adjoint_twisting.size();
  for (std::size_t i = 0; r.adjoint_agrees && i < r.pinching.size(); ++i)
    r.adjoint_agrees = r.pinching[i].pass == r.adjoint_pinching[i].pass;
  for (std::size_t i = 0; r.adjoint_agrees && i < r.twisting.size(); ++i)
    r.adjoint_agrees = r.twisting[i].verdict == r.adjoint_twisting[i].verdict;
  return r;
}

bool QMCertificate::covers(double s) const {
  if (!(s >= 0.0)) return false;
  if (s == 0.0) return true;
  if (is_integer_index(s) && std::find(t_set.begin(), t_set.end(), static_cast<int>(s)) != t_set.end()) return true;
  return real_s;
}

double QMCertificate::log_constant_for(double s) const {
  if (failing_pair || !(c > 0.0)) throw std::invalid_argument("certificate has c = 0; no lower bound is available");
  if (!covers(s)) throw std::invalid_argument("certificate does not cover s = " + std::to_string(s));
  auto log_c_at = [&](int t) {
    if (t == 0) return 0.0;
    const auto it = std::find(t_set.begin(), t_set.end(), t);
    if (it == t_set.end()) throw std::invalid_argument("certificate misses t = " + std::to_string(t));
    return std::log(c_per_t[static_cast<std::size_t>(it - t_set.begin())]);
  };
  if (s == 0.0) return 0.0;
  if (is_integer_index(s) && std::find(t_set.begin(), t_set.end(), static_cast<int>(s)) != t_set.end())
    return log_c_at(static_cast<int>(s));
  const double d = dim;
  if (s > d) return (s / d) * log_c_at(dim);
  const int n = static_cast<int>(std::floor(s));
  const double f = s - n;
  return (1.0 - f) * log_c_at(n) + f * log_c_at(n + 1);
}

double qm_ratio(const Cocycle& c, const Word& i, const Word& k, const Word& j, const std::vector<double>& s_values) {
  const auto sv_ikj = word_log_singular_values(c, i + k + j);
  const auto sv_i = word_log_singular_values(c, i);
  const auto sv_j = word_log_singular_values(c, j);
  double best = std::numeric_limits<double>::infinity();
  for (double s : s_values)
    best = std::min(best, log_phi_from_log_sv(sv_ikj, s) - log_phi_from_log_sv(sv_i, s) - log_phi_from_log_sv(sv_j, s));
  return std::exp(best);
}

namespace {

struct RowResult {
  double min_score = std::numeric_limits<double>::infinity();
  std::size_t argmin_j = 0;
  std::vector<double> min_per_t;
  int max_k = 0;
  std::optional<std::size_t> failing_j;
  std::vector<int> chosen;  // candidate index per J, -1 when none
};

}  // namespace

QMCertificate qm_search(const Cocycle& c, const std::vector<int>& t_set_in, int horizon_L, int k_max) {
  if (horizon_L < 1) throw std::invalid_argument("qm_search: horizon L must be >= 1");
  if (k_max < 0) throw std::invalid_argument("qm_search: k_max must be >= 0");
  std::vector<int> t_set = t_set_in;
  std::sort(t_set.begin(), t_set.end());
  t_set.erase(std::unique(t_set.begin(), t_set.end()), t_set.end());
  if (t_set.empty()) throw std::invalid_argument("qm_search: t_set is empty");
  for (int t : t_set)
    if (t < 0 || t > c.dim()) throw std::invalid_argument("qm_search: t = " + std::to_string(t) + " outside 0..d");

  const auto& sub = c.subshift();
  const auto words = enumerate_words_up_to(sub, horizon_L);
  std::vector<Word> candidates{Word{}};
  if (k_max > 0) {
    auto more = enumerate_words_up_to(sub, k_max);
    candidates.insert(candidates.end(), more.begin(), more.end());
  }
  const double work = static_cast<double>(words.size()) * static_cast<double>(words.size()) *
                      static_cast<double>(candidates.size());
  if (work > kSearchBudget)
    throw std::invalid_argument("qm_search: " + std::to_string(static_cast<long long>(work)) +
                                " evaluations exceed the budget; lower L or k_max");

  const std::size_t nw = words.size();
  const std::size_t nt = t_set.size();
  std::vector<Matrix> products(nw);
  std::vector<std::vector<double>> log_phi(nw, std::vector<double>(nt));
  parallel::run_tasks(nw, [&](std::size_t w) {
    products[w] = evaluate_word(c, words[w]);
    const auto sv = log_singular_values(products[w]);
    for (std::size_t ti = 0; ti < nt; ++ti) log_phi[w][ti] = log_phi_from_log_sv(sv, t_set[ti]);
  });

  const bool retain = nw * nw <= kMaxRetainedPairs;
  std::vector<RowResult> rows(nw);
  parallel::run_tasks(nw, [&](std::size_t ii) {
    const Word& wi = words[ii];
    std::vector<double> best(nw, -std::numeric_limits<double>::infinity());
    std::vector<int> best_k(nw, -1);
    std::vector<std::vector<double>> best_t(nw);
    std::vector<double> ratio_t(nt);
    for (std::size_t ki = 0; ki < candidates.size(); ++ki) {
      const Word& wk = candidates[ki];
      if (!wk.empty() && !sub.allowed(wi.back(), wk.front())) continue;
      if (!wk.empty() && !sub.is_admissible(wk)) continue;
      Matrix ik = products[ii];
      for (std::size_t m = 0; m < wk.size(); ++m) ik = c.generator(wk[m]) * ik;
      const int tail = wk.empty() ? wi.back() : wk.back();
      for (std::size_t jj = 0; jj < nw; ++jj) {
        const Word& wj = words[jj];
        if (!sub.allowed(tail, wj.front())) continue;
        Matrix ikj = ik;
        for (std::size_t m = 0; m < wj.size(); ++m) ikj = c.generator(wj[m]) * ikj;
        const auto sv = log_singular_values(ikj);
        double score = std::numeric_limits<double>::infinity();
        for (std::size_t ti = 0; ti < nt; ++ti) {
          ratio_t[ti] = log_phi_from_log_sv(sv, t_set[ti]) - log_phi[ii][ti] - log_phi[jj][ti];
          score = std::min(score, ratio_t[ti]);
        }
        const double margin = 1e-12 * std::max(1.0, std::abs(best[jj]));
        if (best_k[jj] < 0 || score > best[jj] + margin) {
          best[jj] = score;
          best_k[jj] = static_cast<int>(ki);
          best_t[jj] = ratio_t;
        }
      }
    }
    RowResult& r = rows[ii];
    r.min_per_t.assign(nt, std::numeric_limits<double>::infinity());
    for (std::size_t jj = 0; jj < nw; ++jj) {
      if (best_k[jj] < 0) {
        if (!r.failing_j) r.failing_j = jj;
        continue;
      }
      if (best[jj] < r.min_score) {
        r.min_score = best[jj];
        r.argmin_j = jj;
      }
      for (std::size_t ti = 0; ti < nt; ++ti) r.min_per_t[ti] = std::min(r.min_per_t[ti], best_t[jj][ti]);
      r.max_k = std::max(r.max_k, static_cast<int>(candidates[static_cast<std::size_t>(best_k[jj])].size()));
    }
    if (retain) r.chosen = std::move(best_k);
  });

  QMCertificate cert;
  cert.horizon_L = horizon_L;
  cert.k_max = k_max;
  cert.dim = c.dim();
  cert.t_set = t_set;
  cert.exhaustive = true;
  cert.words_retained = retain;
  cert.cocycle_fingerprint = c.fingerprint();
  double log_c = std::numeric_limits<double>::infinity();
  std::vector<double> log_c_t(nt, std::numeric_limits<double>::infinity());
  for (std::size_t ii = 0; ii < nw; ++ii) {
    const auto& r = rows[ii];
    if (r.failing_j && !cert.failing_pair) cert.failing_pair = std::make_pair(words[ii], words[*r.failing_j]);
    if (r.min_score < log_c) {
      log_c = r.min_score;
      cert.argmin_pair = std::make_pair(words[ii], words[r.argmin_j]);
    }
    for (std::size_t ti = 0; ti < nt; ++ti) log_c_t[ti] = std::min(log_c_t[ti], r.min_per_t[ti]);
    cert.k = std::max(cert.k, r.max_k);
    if (retain)
      for (std::size_t jj = 0; jj < nw; ++jj)
        if (r.chosen[jj] >= 0)
          cert.connecting_words.emplace(std::make_pair(words[ii], words[jj]),
                                        candidates[static_cast<std::size_t>(r.chosen[jj])]);
  }
  if (cert.failing_pair) {
    cert.c = 0.0;
    cert.c_per_t.assign(nt, 0.0);
  } else {
    cert.c = std::exp(log_c);
    for (double v : log_c_t) cert.c_per_t.push_back(std::exp(v));
  }
  cert.derivation = "exhaustive search over integer indices";
  return cert;
}

QMCertificate extend_certificate_to_s(const QMCertificate& cert) {
  if (cert.dim < 1) throw std::invalid_argument("certificate has no fiber dimension");
  for (int t = 1; t <= cert.dim; ++t)
    if (std::find(cert.t_set.begin(), cert.t_set.end(), t) == cert.t_set.end())
      throw std::invalid_argument("cannot extend to real s: t = " + std::to_string(t) + " is not covered");
  QMCertificate out = cert;
  if (std::find(out.t_set.begin(), out.t_set.end(), 0) == out.t_set.end()) {
    out.t_set.insert(out.t_set.begin(), 0);
    out.c_per_t.insert(out.c_per_t.begin(), 1.0);
  }
  out.real_s = true;
  out.derivation =
      "integer indices 0..d checked with one connecting word per pair; for s = n + f, phi^s = (phi^n)^(1-f) "
      "(phi^(n+1))^f exactly, so c_s = c_n^(1-f) c_(n+1)^f >= c; for s > d, c_s = c_d^(s/d)";
  return out;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw std::invalid_argument("certificate " + path + ": " + what);
}

const nlohmann::json& require(const nlohmann::json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) schema_error(path + "/" + key, "missing");
  return j.at(key);
}

double require_number(const nlohmann::json& j, const std::string& key, const std::string& path) {
  const auto& v = require(j, key, path);
  if (!v.is_number()) schema_error(path + "/" + key, "expected a number");
  return v.get<double>();
}

int require_int(const nlohmann::json& j, const std::string& key, const std::string& path) {
  const auto& v = require(j, key, path);
  if (!v.is_number_integer()) schema_error(path + "/" + key, "expected an integer");
  return v.get<int>();
}

bool require_bool(const nlohmann::json& j, const std::string& key, const std::string& path) {
  const auto& v = require(j, key, path);
  if (!v.is_boolean()) schema_error(path + "/" + key, "expected a boolean");
  return v.get<bool>();
}

Word parse_word(const nlohmann::json& v, const std::string& path, int q) {
  if (!v.is_string()) schema_error(path, "expected a word string");
  const auto text = v.get<std::string>();
  if (text.empty()) return Word{};
  try {
    return Word::parse(text, q);
  } catch (const std::invalid_argument& e) {
    schema_error(path, e.what());
  }
}

std::optional<std::pair<Word, Word>> parse_pair(const nlohmann::json& j, const std::string& key, int q) {
  const auto& v = require(j, key, "");
  if (v.is_null()) return std::nullopt;
  if (!v.is_array() || v.size() != 2) schema_error("/" + key, "expected null or [I, J]");
  return std::make_pair(parse_word(v[0], "/" + key + "/0", q), parse_word(v[1], "/" + key + "/1", q));
}

}  // namespace

nlohmann::json to_json(const QMCertificate& cert) {
  nlohmann::json j;
  j["c"] = cert.c;
  j["k"] = cert.k;
  j["horizon_L"] = cert.horizon_L;
  j["k_max"] = cert.k_max;
  j["dim"] = cert.dim;
  j["t_set"] = cert.t_set;
  j["c_per_t"] = cert.c_per_t;
  j["exhaustive"] = cert.exhaustive;
  j["real_s"] = cert.real_s;
  j["derivation"] = cert.derivation;
  j["cocycle_fingerprint"] = hex64(cert.cocycle_fingerprint);
  auto pair_json = [](const std::optional<std::pair<Word, Word>>& p) {
    return p ? nlohmann::json::array({p->first.str(), p->second.str()}) : nlohmann::json(nullptr);
  };
  j["argmin_pair"] = pair_json(cert.argmin_pair);
  j["failing_pair"] = pair_json(cert.failing_pair);
  j["words_retained"] = cert.words_retained;
  auto words = nlohmann::json::array();
  for (const auto& [pair, k] : cert.connecting_words)
    words.push_back({{"I", pair.first.str()}, {"K", k.str()}, {"J", pair.second.str()}});
  j["connecting_words"] = std::move(words);
  return j;
}

QMCertificate certificate_from_json(const nlohmann::json& j, int q) {
  if (!j.is_object()) schema_error("", "expected an object");
  static const std::vector<std::string> known{"c", "k", "horizon_L", "k_max", "dim", "t_set", "c_per_t",
                                              "exhaustive", "real_s", "derivation", "cocycle_fingerprint",
                                              "argmin_pair", "failing_pair", "words_retained", "connecting_words"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) schema_error("/" + key, "unknown key");

  QMCertificate cert;
  cert.c = require_number(j, "c", "");
  if (!(cert.c >= 0.0) || !std::isfinite(cert.c)) schema_error("/c", "must be a finite number >= 0");
  cert.k = require_int(j, "k", "");
  cert.horizon_L = require_int(j, "horizon_L", "");
  cert.k_max = require_int(j, "k_max", "");
  cert.dim = require_int(j, "dim", "");
  if (cert.dim < 1) schema_error("/dim", "must be >= 1");
  const auto& ts = require(j, "t_set", "");
  if (!ts.is_array()) schema_error("/t_set", "expected an array");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!ts[i].is_number_integer()) schema_error("/t_set/" + std::to_string(i), "expected an integer");
    const int t = ts[i].get<int>();
    if (t < 0 || t > cert.dim) schema_error("/t_set/" + std::to_string(i), "outside 0..dim");
    cert.t_set.push_back(t);
  }
  const auto& cs = require(j, "c_per_t", "");
  if (!cs.is_array() || cs.size() != cert.t_set.size()) schema_error("/c_per_t", "expected one value per t_set entry");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (!cs[i].is_number()) schema_error("/c_per_t/" + std::to_string(i), "expected a number");
    const double v = cs[i].get<double>();
    if (!(v >= 0.0) || !std::isfinite(v)) schema_error("/c_per_t/" + std::to_string(i), "must be finite and >= 0");
    cert.c_per_t.push_back(v);
  }
  cert.exhaustive = require_bool(j, "exhaustive", "");
  cert.real_s = require_bool(j, "real_s", "");
  const auto& der = require(j, "derivation", "");
  if (!der.is_string()) schema_error("/derivation", "expected a string");
  cert.derivation = der.get<std::string>();
  const auto& fp = require(j, "cocycle_fingerprint", "");
  if (!fp.is_string() || fp.get<std::string>().size() != 16) schema_error("/cocycle_fingerprint", "expected 16 hex digits");
  try {
    std::size_t used = 0;
    cert.cocycle_fingerprint = std::stoull(fp.get<std::string>(), &used, 16);
    if (used != 16) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    schema_error("/cocycle_fingerprint", "expected 16 hex digits");
  }
  cert.argmin_pair = parse_pair(j, "argmin_pair", q);
  cert.failing_pair = parse_pair(j, "failing_pair", q);
  cert.words_retained = require_bool(j, "words_retained", "");
  const auto& cw = require(j, "connecting_words", "");
  if (!cw.is_array()) schema_error("/connecting_words", "expected an array");
  for (std::size_t i = 0; i < cw.size(); ++i) {
    const std::string path = "/connecting_words/" + std::to_string(i);
    if (!cw[i].is_object()) schema_error(path, "expected an object");
    const Word wi = parse_word(require(cw[i], "I", path), path + "/I", q);
    const Word wk = parse_word(require(cw[i], "K", path), path + "/K", q);
    const Word wj = parse_word(require(cw[i], "J", path), path + "/J", q);
    cert.connecting_words.emplace(std::make_pair(wi, wj), wk);
  }
  return cert;
}

}  // namespace tfc
