#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "spec_file.hpp"
#include "tfc/certify.hpp"
#include "tfc/equilibrium.hpp"
#include "tfc/lyapunov.hpp"
#include "tfc/parallel.hpp"
#include "tfc/pressure.hpp"

namespace tfc::cli {

using ojson = nlohmann::ordered_json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.14e", x);
  return buf;
}

namespace {

void dump_value(const ojson& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case ojson::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + ojson(key).dump() + ": ";
        dump_value(value, out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case ojson::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ",\n";
        out += pad;
        dump_value(j[i], out, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case ojson::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) row += ',';
    row += cells[i];
  }
  return row + "\n";
}

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size() || !std::isfinite(v))
      throw std::invalid_argument(what + ": '" + tok + "' is not a finite number");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(what + ": empty list");
  return out;
}

std::vector<int> parse_ints(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (double v : parse_doubles(text, what)) {
    if (v != std::floor(v)) throw std::invalid_argument(what + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

/// "a:b:step" -> a, a + step, ..., up to b.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(parse_doubles(tok, "grid").front());
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
    throw std::invalid_argument("grid must be a:b:step with a <= b and step > 0");
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  if (count > 100000) throw std::invalid_argument("grid has too many points");
  for (long i = 0; i <= count; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  return out;
}

Word parse_word_arg(const std::string& text, int q, const std::string& what) {
  try {
    Word w = Word::parse(text, q);
    if (w.empty()) throw std::invalid_argument("empty word");
    return w;
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(what + ": " + e.what());
  }
}

struct CertOptions {
  std::string path;
  bool auto_cert = false;
  int horizon_L = 4;
  int k_max = 2;
};

void add_cert_options(CLI::App* cmd, CertOptions& o, int default_L, int default_kmax) {
  o.horizon_L = default_L;
  o.k_max = default_kmax;
  cmd->add_option("--cert", o.path, "QM certificate JSON file");
  cmd->add_flag("--auto-cert", o.auto_cert, "search a certificate over t = 1..d before running");
  cmd->add_option("--L", o.horizon_L, "certificate horizon (max |I|, |J|)")->check(CLI::PositiveNumber);
  cmd->add_option("--kmax", o.k_max, "max connecting-word length")->check(CLI::NonNegativeNumber);
}

/// Full-index certificate extended to real s when it covers 1..d.
QMCertificate searched_certificate(const Cocycle& c, const std::vector<int>& t_set, int horizon_L, int k_max) {
  auto cert = qm_search(c, t_set, horizon_L, k_max);
  bool full = true;
  for (int t = 1; t <= c.dim(); ++t)
    full = full && std::find(cert.t_set.begin(), cert.t_set.end(), t) != cert.t_set.end();
  return full ? extend_certificate_to_s(cert) : cert;
}

std::vector<int> all_indices(const Cocycle& c) {
  std::vector<int> t;
  for (int i = 1; i <= c.dim(); ++i) t.push_back(i);
  return t;
}

std::optional<QMCertificate> obtain_certificate(const Cocycle& c, const CertOptions& o) {
  if (!o.path.empty() && o.auto_cert) throw std::invalid_argument("give either --cert or --auto-cert");
  if (!o.path.empty()) {
    const std::string text = read_file(o.path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(o.path + ": " + e.what());
    }
    try {
      return certificate_from_json(j, c.alphabet_size());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(o.path + ": " + e.what());
    }
  }
  if (o.auto_cert) return searched_certificate(c, all_indices(c), o.horizon_L, o.k_max);
  return std::nullopt;
}

ojson optional_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson bracket_json(const PressureBracket& b) {
  ojson j;
  j["s"] = b.s;
  j["n"] = b.n;
  j["lower"] = optional_number(b.lower);
  j["upper"] = b.upper;
  j["fekete_C"] = optional_number(b.fekete_C);
  return j;
}

ojson certificate_summary(const QMCertificate& cert) {
  const auto full = to_json(cert);
  ojson j;
  for (const char* key : {"c", "k", "horizon_L", "k_max", "dim", "t_set", "c_per_t", "exhaustive", "real_s",
                          "derivation", "cocycle_fingerprint", "argmin_pair", "failing_pair", "words_retained"})
    j[key] = ojson::parse(full.at(key).dump());
  j["connecting_word_count"] = cert.connecting_words.size();
  return j;
}

// ---- commands -------------------------------------------------------------------------

struct PressureOptions {
  std::string spec;
  std::optional<double> s;
  std::string grid;
  int n = 8;
  CertOptions cert;
};

int cmd_pressure(const PressureOptions& o, std::ostream& out) {
  const auto spec = load_spec_file(o.spec);
  const Cocycle& c = spec.cocycle;
  if (o.s.has_value() == !o.grid.empty()) throw std::invalid_argument("give exactly one of --s and --grid");
  const std::vector<double> grid = o.s ? std::vector<double>{*o.s} : parse_grid(o.grid);
  const auto cert = obtain_certificate(c, o.cert);
  const auto rows = pressure_curve(c, cert ? &*cert : nullptr, grid, o.n);
  out << csv_row({"s", "lower", "upper", "n", "fekete_C"});
  bool partial = false;
  for (const auto& b : rows) {
    partial = partial || !b.certified();
    out << csv_row({format_double(b.s), b.lower ? format_double(*b.lower) : "", format_double(b.upper),
                    std::to_string(b.n), b.fekete_C ? format_double(*b.fekete_C) : ""});
  }
  return partial ? kPartial : kOk;
}

struct DimensionOptions {
  std::string spec;
  double tol = kDefaultTolS;
  int n_max = 12;
  CertOptions cert;
};

int cmd_dimension(const DimensionOptions& o, std::ostream& out) {
  const auto spec = load_spec_file(o.spec);
  const Cocycle& c = spec.cocycle;
  for (int a = 0; a < c.alphabet_size(); ++a)
    if (!(operator_norm(c.generator(a)) < 1.0))
      throw std::invalid_argument("generator " + std::to_string(a + 1) + " is not a contraction (norm >= 1)");
  std::optional<QMCertificate> cert;
  if (!o.cert.path.empty()) {
    cert = obtain_certificate(c, o.cert);
  } else {
    cert = dimension_certificate(c, o.cert.horizon_L, o.cert.k_max);
  }
  const auto r = bowen_root(c, *cert, o.tol, o.n_max);
  ojson j;
  j["s_star"] = r.s_star;
  j["s_interval"] = ojson::array({r.s_lo, r.s_hi});
  j["converged"] = r.converged;
  j["degenerate"] = r.degenerate;
  j["bracket"] = {{"lower", r.root_lower()}, {"upper", r.root_upper()}};
  j["n_used"] = r.n_used;
  j["certificate"] = {{"c", cert->c}, {"k", cert->k}, {"horizon_L", cert->horizon_L}};
  j["warnings"] = r.warnings;
  out << dump_json(j) << "\n";
  return r.converged ? kOk : kPartial;
}

struct CertifyOptions {
  std::string spec;
  std::string p;
  std::string z;
  int ell = 0;
  int horizon_L = 6;
  int k_max = 4;
  std::string t_list;
  double gap_tol = kDefaultGapTol;
  double zero_tol = kDefaultZeroTol;
  std::string cert_out;
};

ojson pinching_json(const std::vector<PinchingVerdict>& v) {
  ojson a = ojson::array();
  for (const auto& p : v) a.push_back({{"t", p.t}, {"pass", p.pass}, {"modulus_gap", p.modulus_gap}});
  return a;
}

ojson twisting_json(const std::vector<TwistingVerdict>& v) {
  ojson a = ojson::array();
  for (const auto& tw : v) {
    ojson rows = ojson::array();
    for (Eigen::Index i = 0; i < tw.coefficients.rows(); ++i) {
      ojson row = ojson::array();
      for (Eigen::Index k = 0; k < tw.coefficients.cols(); ++k) row.push_back(tw.coefficients(i, k));
      rows.push_back(row);
    }
    a.push_back({{"t", tw.t},
                 {"verdict", to_string(tw.verdict)},
                 {"min_abs_coefficient", tw.min_abs_coefficient},
                 {"coefficients", rows}});
  }
  return a;
}

int cmd_certify(const CertifyOptions& o, std::ostream& out) {
  const auto spec = load_spec_file(o.spec);
  const Cocycle& c = spec.cocycle;
  const int q = c.alphabet_size();
  HomoclinicSpec h;
  h.p_word = parse_word_arg(o.p, q, "--p");
  const Word z = parse_word_arg(o.z, q, "--z");
  if (z.front() != h.p_word.front()) throw std::invalid_argument("--z must start with the first symbol of --p");
  h.excursion = z.slice(1, z.size() - 1);
  h.ell = o.ell;
  h.validate(c.subshift());

  const auto irr = irreducibility(c);
  const auto rep = typicality_report(c, h, o.gap_tol, o.zero_tol);
  const auto t_set = o.t_list.empty() ? all_indices(c) : parse_ints(o.t_list, "--t");
  const auto cert = searched_certificate(c, t_set, o.horizon_L, o.k_max);

  ojson j;
  j["irreducibility"] = {{"irreducible_over_C", irr.irreducible_over_c}, {"algebra_dim", irr.algebra_dim}};
  ojson typ;
  typ["p"] = h.p_word.str();
  typ["z"] = h.z_block().str();
  typ["ell"] = h.ell;
  typ["gap_tol"] = rep.gap_tol;
  typ["zero_tol"] = rep.zero_tol;
  typ["pinching"] = pinching_json(rep.pinching);
  typ["twisting"] = twisting_json(rep.twisting);
  typ["adjoint_pinching"] = pinching_json(rep.adjoint_pinching);
  typ["adjoint_twisting"] = twisting_json(rep.adjoint_twisting);
  typ["adjoint_agrees"] = rep.adjoint_agrees;
  typ["typical"] = rep.typical;
  j["typicality"] = typ;
  j["certificate"] = certificate_summary(cert);
  out << dump_json(j) << "\n";
  if (!o.cert_out.empty()) {
    std::ofstream f(o.cert_out, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write " + o.cert_out);
    f << to_json(cert).dump(2) << "\n";
  }
  return cert.c > 0.0 ? kOk : kPartial;
}

struct GibbsOptions {
  std::string spec;
  double s = 1.0;
  int n = 8;
  int m = 4;
  std::optional<double> p_mid;
  bool csv = false;
  CertOptions cert;
};

int cmd_gibbs(const GibbsOptions& o, std::ostream& out) {
  const auto spec = load_spec_file(o.spec);
  const Cocycle& c = spec.cocycle;
  const auto cert = obtain_certificate(c, o.cert);
  const auto bracket = pressure_bracket(c, o.s, o.n, cert ? &*cert : nullptr);
  const double p_mid = o.p_mid.value_or(bracket.midpoint());
  const auto mu = gibbs_mu(c, o.s, o.n, o.m);
  if (o.csv) {
    out << csv_row({"word", "weight"});
    for (std::size_t i = 0; i < mu.words.size(); ++i) out << csv_row({mu.words[i].str(), format_double(mu.weights[i])});
    return bracket.certified() || o.p_mid ? kOk : kPartial;
  }
  const auto ratios = gibbs_ratio_check(mu, c, o.s, p_mid);
  const auto var = variational_terms(c, o.s, mu, bracket);
  ojson j;
  j["s"] = o.s;
  j["n"] = o.n;
  j["m"] = o.m;
  j["pressure"] = bracket_json(bracket);
  j["p_mid"] = p_mid;
  ojson zero = ojson::array();
  for (const auto& w : ratios.zero_weight) zero.push_back(w.str());
  j["gibbs"] = {{"min_ratio", ratios.min_ratio},
                {"max_ratio", ratios.max_ratio},
                {"gibbs_constant", ratios.gibbs_constant},
                {"zero_weight", zero}};
  j["variational"] = {{"entropy", var.entropy}, {"energy", var.energy}, {"gap", var.gap}};
  j["shift_invariance_defect"] = o.m >= 2 ? ojson(shift_invariance_defect(mu)) : ojson(nullptr);
  ojson measure = ojson::array();
  for (std::size_t i = 0; i < mu.words.size(); ++i) {
    const double phi = std::exp(log_phi_word(c, mu.words[i], o.s));
    const double ratio = mu.weights[i] / (std::exp(-o.m * p_mid) * phi);
    measure.push_back({{"word", mu.words[i].str()}, {"weight", mu.weights[i]}, {"ratio", ratio}});
  }
  j["measure"] = measure;
  out << dump_json(j) << "\n";
  return bracket.certified() || o.p_mid ? kOk : kPartial;
}

struct LyapunovOptions {
  std::string spec;
  std::string periodic;
  int hull = 0;
  std::string itinerary;
  int n = 0;
  bool witness = false;
  std::string x;
  std::string y;
  double gamma = 0.5;
  long prefix = 10000;
  long stride = 100;
  CertOptions cert;
};

std::vector<std::string> lambda_header(const Cocycle& c, const std::string& first) {
  std::vector<std::string> h{first};
  for (int t = 1; t <= c.dim(); ++t) h.push_back("lambda_" + std::to_string(t));
  return h;
}

int cmd_lyapunov(const LyapunovOptions& o, std::ostream& out) {
  const auto spec = load_spec_file(o.spec);
  const Cocycle& c = spec.cocycle;
  const int q = c.alphabet_size();
  const int modes = (!o.periodic.empty()) + (o.hull > 0) + (!o.itinerary.empty()) + o.witness;
  if (modes != 1) throw std::invalid_argument("give exactly one of --periodic, --hull, --itinerary, --witness");

  if (!o.periodic.empty()) {
    const Word w = parse_word_arg(o.periodic, q, "--periodic");
    std::vector<std::string> row{w.str()};
    for (double v : periodic_exponents(c, w)) row.push_back(format_double(v));
    out << csv_row(lambda_header(c, "word")) << csv_row(row);
    return kOk;
  }
  if (o.hull > 0) {
    const auto sample = spectrum_hull(c, o.hull);
    auto header = lambda_header(c, "word");
    header.push_back("vertex");
    out << csv_row(header);
    for (std::size_t i = 0; i < sample.points.size(); ++i) {
      std::vector<std::string> row{sample.sources[i].str()};
      for (Eigen::Index t = 0; t < sample.points[i].size(); ++t) row.push_back(format_double(sample.points[i](t)));
      const bool vertex =
          std::find(sample.hull.vertices.begin(), sample.hull.vertices.end(), i) != sample.hull.vertices.end();
      row.push_back(sample.hull.computed ? (vertex ? "1" : "0") : "");
      out << csv_row(row);
    }
    return sample.hull.computed ? kOk : kPartial;
  }
  if (!o.itinerary.empty()) {
    const Word w = parse_word_arg(o.itinerary, q, "--itinerary");
    if (o.n < 1) throw std::invalid_argument("--n must be >= 1 with --itinerary");
    if (!c.subshift().is_cyclically_admissible(w))
      throw std::invalid_argument("--itinerary word must be cyclically admissible to repeat");
    std::vector<int> it;
    for (int i = 0; i < o.n; ++i) it.push_back(w[static_cast<std::size_t>(i) % w.size()]);
    std::vector<std::string> row{std::to_string(o.n)};
    for (double v : pointwise_exponents(c, it, o.n, all_indices(c))) row.push_back(format_double(v));
    out << csv_row(lambda_header(c, "n")) << csv_row(row);
    return kOk;
  }
  const Word x = parse_word_arg(o.x, q, "--x");
  const Word y = parse_word_arg(o.y, q, "--y");
  QMCertificate cert = o.cert.path.empty() ? qm_search(c, all_indices(c), o.cert.horizon_L, o.cert.k_max)
                                           : *obtain_certificate(c, o.cert);
  const auto w = convexity_witness(c, x, y, o.gamma, cert, o.prefix, o.stride);
  out << csv_row({"m", "t", "value"});
  for (const auto& tp : w.trace)
    for (std::size_t t = 0; t < tp.values.size(); ++t)
      out << csv_row({std::to_string(tp.m), std::to_string(t + 1), format_double(tp.values[t])});
  return kOk;
}

struct MultifractalOptions {
  std::string spec;
  std::string q_list;
  std::string q_grid;
  std::string t_list = "1";
  int n = 8;
  double step = kDefaultFdStep;
  CertOptions cert;
};

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

int cmd_multifractal(const MultifractalOptions& o, std::ostream& out) {
  const auto spec = load_spec_file(o.spec);
  const Cocycle& c = spec.cocycle;
  const auto t_vec = parse_ints(o.t_list, "--t");
  if (o.q_list.empty() == o.q_grid.empty()) throw std::invalid_argument("give exactly one of --q and --qgrid");
  std::vector<std::vector<double>> qs;
  if (!o.q_list.empty()) {
    qs.push_back(parse_doubles(o.q_list, "--q"));
  } else {
    if (t_vec.size() != 1) throw std::invalid_argument("--qgrid needs a single --t index");
    for (double v : parse_grid(o.q_grid)) qs.push_back({v});
  }
  const auto cert = obtain_certificate(c, o.cert);
  out << csv_row({"q", "P", "alpha", "level_entropy"});
  bool partial = false;
  for (const auto& q : qs) {
    const auto pt = multifractal_point(c, q, t_vec, o.n, cert ? &*cert : nullptr, o.step);
    partial = partial || !pt.pressure.certified() || !pt.gradient_consistent;
    out << csv_row({join_doubles(q), format_double(pt.pressure.midpoint()), join_doubles(pt.alpha_vec),
                    format_double(pt.level_entropy)});
  }
  return partial ? kPartial : kOk;
}

void write_manifest(const std::string& out_path, const std::vector<std::string>& args, const std::string& command,
                    const std::string& spec_path, const std::string& body, int code, double seconds) {
  ojson m;
  m["tool"] = "tfc";
  m["version"] = kVersion;
  m["command"] = command;
  m["argv"] = args;
  m["spec"] = spec_path;
  try {
    m["spec_sha256"] = sha256_hex(read_file(spec_path));
  } catch (const SpecError&) {
    m["spec_sha256"] = nullptr;
  }
  m["output"] = out_path;
  m["output_sha256"] = sha256_hex(body);
  m["exit_code"] = code;
  m["threads"] = parallel::thread_count();
  m["wall_time_seconds"] = seconds;
  std::ofstream f(out_path + ".manifest.json", std::ios::binary);
  f << dump_json(m) << "\n";
}

}  // namespace

std::string dump_json(const ojson& j) {
  std::string out;
  dump_value(j, out, 0);
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermodynamic formalism toolkit for matrix cocycles over subshifts of finite type", "tfc"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  std::string out_path;
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_path, "write the result to FILE plus FILE.manifest.json");

  PressureOptions po;
  auto* pressure = app.add_subcommand("pressure", "pressure brackets as CSV: s,lower,upper,n,fekete_C");
  pressure->add_option("spec", po.spec, "cocycle spec file")->required();
  pressure->add_option("--s", po.s, "potential parameter");
  pressure->add_option("--grid", po.grid, "parameter grid a:b:step");
  pressure->add_option("--n", po.n, "depth")->check(CLI::PositiveNumber);
  add_cert_options(pressure, po.cert, 4, 2);

  DimensionOptions dopt;
  auto* dimension = app.add_subcommand("dimension", "root of s -> P(s) as JSON");
  dimension->add_option("spec", dopt.spec, "cocycle spec file")->required();
  dimension->add_option("--tol", dopt.tol, "s tolerance")->check(CLI::PositiveNumber);
  dimension->add_option("--nmax", dopt.n_max, "deepest depth")->check(CLI::PositiveNumber);
  dimension->add_option("--cert", dopt.cert.path, "QM certificate JSON file (must cover real s)");
  dimension->add_option("--L", dopt.cert.horizon_L, "certificate horizon")->check(CLI::PositiveNumber);
  dimension->add_option("--kmax", dopt.cert.k_max, "max connecting-word length")->check(CLI::NonNegativeNumber);

  CertifyOptions co;
  auto* certify = app.add_subcommand("certify", "irreducibility, typicality and QM certificate as JSON");
  certify->add_option("spec", co.spec, "cocycle spec file")->required();
  certify->add_option("--p", co.p, "period word of the periodic point")->required();
  certify->add_option("--z", co.z, "z_0 .. z_{l-1}: first symbol of p followed by the excursion")->required();
  certify->add_option("--ell", co.ell, "return time l")->required();
  certify->add_option("--L", co.horizon_L, "certificate horizon")->check(CLI::PositiveNumber);
  certify->add_option("--kmax", co.k_max, "max connecting-word length")->check(CLI::NonNegativeNumber);
  certify->add_option("--t", co.t_list, "comma-separated exterior indices (default 1..d)");
  certify->add_option("--gap-tol", co.gap_tol, "relative eigenvalue modulus gap")->check(CLI::PositiveNumber);
  certify->add_option("--zero-tol", co.zero_tol, "twisting coefficient threshold")->check(CLI::PositiveNumber);
  certify->add_option("--cert-out", co.cert_out, "write the full certificate JSON here");

  GibbsOptions go;
  auto* gibbs = app.add_subcommand("gibbs", "Gibbs approximants and checks as JSON (or --csv weights)");
  gibbs->add_option("spec", go.spec, "cocycle spec file")->required();
  gibbs->add_option("--s", go.s, "potential parameter");
  gibbs->add_option("--n", go.n, "depth of nu_n")->check(CLI::PositiveNumber);
  gibbs->add_option("--m", go.m, "marginal depth")->check(CLI::PositiveNumber);
  gibbs->add_option("--p-mid", go.p_mid, "pressure value for the Gibbs ratios (default: bracket midpoint)");
  gibbs->add_flag("--csv", go.csv, "emit word,weight CSV instead of JSON");
  add_cert_options(gibbs, go.cert, 4, 2);

  LyapunovOptions lo;
  auto* lyapunov = app.add_subcommand("lyapunov", "Lyapunov exponents as CSV");
  lyapunov->add_option("spec", lo.spec, "cocycle spec file")->required();
  lyapunov->add_option("--periodic", lo.periodic, "exponents of a periodic orbit");
  lyapunov->add_option("--hull", lo.hull, "periodic spectrum up to this period")->check(CLI::PositiveNumber);
  lyapunov->add_option("--itinerary", lo.itinerary, "running exponents along a repeated word");
  lyapunov->add_option("--n", lo.n, "horizon for --itinerary");
  lyapunov->add_flag("--witness", lo.witness, "convexity witness trace m,t,value");
  lyapunov->add_option("--x", lo.x, "first periodic word");
  lyapunov->add_option("--y", lo.y, "second periodic word");
  lyapunov->add_option("--gamma", lo.gamma, "mixing proportion in [0,1]");
  lyapunov->add_option("--prefix", lo.prefix, "itinerary length")->check(CLI::PositiveNumber);
  lyapunov->add_option("--stride", lo.stride, "trace sampling stride")->check(CLI::PositiveNumber);
  lyapunov->add_option("--cert", lo.cert.path, "QM certificate JSON with connecting words");
  lo.cert.horizon_L = 6;
  lo.cert.k_max = 4;
  lyapunov->add_option("--L", lo.cert.horizon_L, "certificate horizon")->check(CLI::PositiveNumber);
  lyapunov->add_option("--kmax", lo.cert.k_max, "max connecting-word length")->check(CLI::NonNegativeNumber);

  MultifractalOptions mo;
  auto* multifractal = app.add_subcommand("multifractal", "weighted pressure, gradient, level entropy as CSV");
  multifractal->add_option("spec", mo.spec, "cocycle spec file")->required();
  multifractal->add_option("--q", mo.q_list, "comma-separated weights");
  multifractal->add_option("--qgrid", mo.q_grid, "weight grid a:b:step (single --t)");
  multifractal->add_option("--t", mo.t_list, "comma-separated exterior indices");
  multifractal->add_option("--n", mo.n, "depth")->check(CLI::PositiveNumber);
  multifractal->add_option("--step", mo.step, "finite-difference step")->check(CLI::PositiveNumber);
  add_cert_options(multifractal, mo.cert, 4, 2);

  std::vector<const char*> argv{"tfc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  parallel::set_thread_count(threads);
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream body;
  std::string command;
  std::string spec_path;
  int code = kOk;
  try {
    if (*pressure) {
      command = "pressure", spec_path = po.spec;
      code = cmd_pressure(po, body);
    } else if (*dimension) {
      command = "dimension", spec_path = dopt.spec;
      code = cmd_dimension(dopt, body);
    } else if (*certify) {
      command = "certify", spec_path = co.spec;
      code = cmd_certify(co, body);
    } else if (*gibbs) {
      command = "gibbs", spec_path = go.spec;
      code = cmd_gibbs(go, body);
    } else if (*lyapunov) {
      command = "lyapunov", spec_path = lo.spec;
      code = cmd_lyapunov(lo, body);
    } else {
      command = "multifractal", spec_path = mo.spec;
      code = cmd_multifractal(mo, body);
    }
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (out_path.empty()) {
    out << body.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << out_path << "\n";
      return kInputError;
    }
    f << body.str();
    write_manifest(out_path, args, command, spec_path, body.str(), code, seconds);
  }
  if (code == kPartial) err << "note: result is partial or uncertified (exit 2)\n";
  return code;
}

}  // namespace tfc::cli
