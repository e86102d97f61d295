#include "tfc/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tfc {

namespace {

void validate_generator(const Matrix& m, int dim, const std::string& label) {
  if (m.rows() != dim || m.cols() != dim)
    throw std::invalid_argument(label + ": expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  if (!m.allFinite()) throw std::invalid_argument(label + ": non-finite entry");
  const auto sv = singular_values(m).values;
  if (!(sv.back() > 0.0)) throw std::invalid_argument(label + ": matrix is singular");
  const double cond = sv.front() / sv.back();
  if (!(cond <= kMaxConditionNumber))
    throw std::invalid_argument(label + ": condition number " + std::to_string(cond) + " exceeds 1e12");
}

void validate_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("holder_alpha must lie in (0,1]");
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= kFnvPrime;
  }
}

long gcd_long(long a, long b) { return b == 0 ? a : gcd_long(b, a % b); }

}  // namespace

Cocycle::Cocycle(Subshift base, std::vector<Matrix> generators, double holder_alpha)
    : base_(std::move(base)), generators_(std::move(generators)), holder_alpha_(holder_alpha) {
  validate_alpha(holder_alpha_);
  if (static_cast<int>(generators_.size()) != base_.alphabet_size())
    throw std::invalid_argument("expected one generator per symbol (" + std::to_string(base_.alphabet_size()) + "), got " +
                                std::to_string(generators_.size()));
  dim_ = static_cast<int>(generators_.front().rows());
  if (dim_ < 1) throw std::invalid_argument("fiber dimension must be positive");
  max_norm_ = 0.0;
  double min_conorm = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < generators_.size(); ++a) {
    validate_generator(generators_[a], dim_, "generator " + std::to_string(a + 1));
    const auto sv = singular_values(generators_[a]).values;
    max_norm_ = std::max(max_norm_, sv.front());
    min_conorm = std::min(min_conorm, sv.back());
  }
  upsilon_ = std::max(max_norm_, 1.0);
  varrho_ = std::min(min_conorm, 1.0);
}

std::uint64_t Cocycle::fingerprint() const {
  std::uint64_t h = kFnvOffset;
  const int q = alphabet_size();
  fnv_mix(h, &q, sizeof q);
  fnv_mix(h, &dim_, sizeof dim_);
  for (const auto& row : base_.adjacency())
    for (int v : row) fnv_mix(h, &v, sizeof v);
  for (const auto& g : generators_)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      for (Eigen::Index i = 0; i < g.rows(); ++i) {
        const double v = g(i, j);
        fnv_mix(h, &v, sizeof v);
      }
  return h;
}

Matrix evaluate_word(const Cocycle& c, const Word& w) {
  if (w.empty()) throw std::invalid_argument("evaluate_word: empty word");
  if (auto bad = c.subshift().first_violation(w))
    throw std::invalid_argument("word " + w.str() + " is not admissible at position " + std::to_string(*bad + 1));
  Matrix out = c.generator(w[0]);
  for (std::size_t i = 1; i < w.size(); ++i) out = c.generator(w[i]) * out;
  return out;
}

std::vector<double> word_log_singular_values(const Cocycle& c, const Word& w) {
  return log_singular_values(evaluate_word(c, w));
}

double log_phi_word(const Cocycle& c, const Word& w, double s) {
  return log_phi_from_log_sv(word_log_singular_values(c, w), s);
}

double phi_word(const Cocycle& c, const Word& w, double s) { return std::exp(log_phi_word(c, w, s)); }

double fiber_bunching_margin(const Cocycle& c) {
  const double theta_alpha = std::pow(c.subshift().theta(), c.holder_alpha());
  double worst = 0.0;
  for (const auto& g : c.generators()) {
    const auto sv = singular_values(g).values;
    worst = std::max(worst, sv.front() / sv.back() * theta_alpha);
  }
  return worst;
}

BlockCocycle::BlockCocycle(Subshift base, int radius, std::map<Word, Matrix> blocks, double holder_alpha)
    : base_(std::move(base)), radius_(radius), blocks_(std::move(blocks)), holder_alpha_(holder_alpha) {
  validate_alpha(holder_alpha_);
  if (radius_ < 0) throw std::invalid_argument("block radius must be >= 0");
  alphabet_ = enumerate_words(base_, 2 * radius_ + 1);
  if (alphabet_.empty()) throw std::invalid_argument("empty block language");
  dim_ = -1;
  for (const auto& blk : alphabet_) {
    auto it = blocks_.find(blk);
    if (it == blocks_.end()) throw std::invalid_argument("no generator for admissible block " + blk.str());
    if (dim_ < 0) dim_ = static_cast<int>(it->second.rows());
    validate_generator(it->second, dim_, "block " + blk.str());
  }
  for (const auto& [blk, m] : blocks_) {
    if (static_cast<int>(blk.size()) != 2 * radius_ + 1)
      throw std::invalid_argument("block " + blk.str() + " has the wrong length");
    if (!base_.is_admissible(blk)) throw std::invalid_argument("block " + blk.str() + " is not admissible");
  }
}

const Matrix& BlockCocycle::generator(const Word& block) const {
  auto it = blocks_.find(block);
  if (it == blocks_.end()) throw std::invalid_argument("no generator for block " + block.str());
  return it->second;
}

Cocycle recode(const BlockCocycle& b) {
  const auto& alphabet = b.block_alphabet();
  const std::size_t n = alphabet.size();
  const std::size_t span = static_cast<std::size_t>(2 * b.radius());
  AdjacencyMatrix adj(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      adj[i][j] = std::equal(alphabet[i].symbols.begin() + 1, alphabet[i].symbols.end(), alphabet[j].symbols.begin(),
                             alphabet[j].symbols.begin() + static_cast<std::ptrdiff_t>(span)) &&
                          b.subshift().allowed(alphabet[i].symbols.back(), alphabet[j].symbols.back())
                      ? 1
                      : 0;
  std::vector<Matrix> gens;
  gens.reserve(n);
  for (const auto& blk : alphabet) gens.push_back(b.generator(blk));
  return Cocycle(Subshift(std::move(adj), b.subshift().theta()), std::move(gens), b.holder_alpha());
}

Word recode_word(const BlockCocycle& b, const Word& original) {
  const std::size_t width = static_cast<std::size_t>(2 * b.radius() + 1);
  if (original.size() < width) throw std::invalid_argument("recode_word: word shorter than one block");
  if (!b.subshift().is_admissible(original)) throw std::invalid_argument("recode_word: inadmissible word");
  const auto& alphabet = b.block_alphabet();
  Word out;
  for (std::size_t i = 0; i + width <= original.size(); ++i) {
    const Word blk = original.slice(i, width);
    auto it = std::lower_bound(alphabet.begin(), alphabet.end(), blk);
    out.symbols.push_back(static_cast<int>(it - alphabet.begin()));
  }
  return out;
}

Matrix evaluate_block_word(const BlockCocycle& b, const Word& original) {
  const std::size_t width = static_cast<std::size_t>(2 * b.radius() + 1);
  if (original.size() < width) throw std::invalid_argument("evaluate_block_word: word shorter than one block");
  if (!b.subshift().is_admissible(original)) throw std::invalid_argument("evaluate_block_word: inadmissible word");
  Matrix out = b.generator(original.slice(0, width));
  for (std::size_t i = 1; i + width <= original.size(); ++i) out = b.generator(original.slice(i, width)) * out;
  return out;
}

int Ray::at(long i) const {
  if (i < first_index) throw std::out_of_range("ray is undefined at index " + std::to_string(i));
  if (cycle.empty()) throw std::invalid_argument("ray needs a non-empty cycle");
  const auto offset = static_cast<std::size_t>(i - first_index);
  if (offset < head.size()) return head[offset];
  return cycle[(offset - head.size()) % cycle.size()];
}

bool Ray::agrees_from_zero(const Ray& other) const {
  const long lcm = static_cast<long>(cycle.size()) / gcd_long(static_cast<long>(cycle.size()), static_cast<long>(other.cycle.size())) *
                   static_cast<long>(other.cycle.size());
  const long settled = std::max({0L, first_index + static_cast<long>(head.size()),
                                 other.first_index + static_cast<long>(other.head.size())});
  for (long i = 0; i < settled + lcm; ++i)
    if (at(i) != other.at(i)) return false;
  return true;
}

HolonomyResult holonomy(const Cocycle& c, const Ray& x, const Ray& y, int n) {
  if (n < 1) throw std::invalid_argument("holonomy: truncation N must be >= 1");
  if (x.first_index > 0 || y.first_index > 0) throw std::invalid_argument("holonomy: rays must cover index 0");
  if (!x.agrees_from_zero(y)) throw std::invalid_argument("holonomy: rays disagree at some index >= 0");
  // Identical factors at every index >= 0 cancel exactly.
  return {Matrix::Identity(c.dim(), c.dim()), 0.0};
}

HolonomyResult holonomy(const BlockCocycle& b, const Ray& x, const Ray& y, int n) {
  if (n < 1) throw std::invalid_argument("holonomy: truncation N must be >= 1");
  const long k = b.radius();
  if (x.first_index > -k || y.first_index > -k)
    throw std::invalid_argument("holonomy: block rays must start at index <= -radius");
  if (!x.agrees_from_zero(y)) throw std::invalid_argument("holonomy: rays disagree at some index >= 0");
  const int d = b.dim();
  auto block_at = [&](const Ray& r, long i) {
    Word w;
    for (long j = i - k; j <= i + k; ++j) w.symbols.push_back(r.at(j));
    return w;
  };
  // H_{j+1} = A^j(y)^{-1} (Y_j^{-1} X_j) A^j(y) H_j; the middle factor is exactly I when blocks match.
  Matrix h = Matrix::Identity(d, d);
  Matrix prev = h;
  Matrix ay = Matrix::Identity(d, d);
  for (long j = 0; j < n; ++j) {
    prev = h;
    const Word bx = block_at(x, j), by = block_at(y, j);
    const Matrix& gy = b.generator(by);
    if (bx != by) {
      const Matrix& gx = b.generator(bx);
      const Matrix step = gy.partialPivLu().solve(gx);
      h = ay.partialPivLu().solve(step * ay * h);
    }
    ay = gy * ay;
  }
  return {h, operator_norm(h - prev)};
}

Matrix holonomy_loop(const Cocycle& c, const HomoclinicSpec& h) {
  h.validate(c.subshift());
  Word p_run;
  for (int i = 0; i < h.ell; ++i) p_run.symbols.push_back(h.p_word[static_cast<std::size_t>(i) % h.p_word.size()]);
  const Matrix ap = evaluate_word(c, p_run);
  const Matrix az = evaluate_word(c, h.z_block());
  return ap.partialPivLu().solve(az);
}

Cocycle adjoint_cocycle(const Cocycle& c) {
  std::vector<Matrix> gens;
  gens.reserve(c.generators().size());
  for (const auto& g : c.generators()) gens.push_back(adjoint(g));
  return Cocycle(c.subshift().transposed(), std::move(gens), c.holder_alpha());
}

HomoclinicSpec adjoint_homoclinic(const HomoclinicSpec& h) {
  HomoclinicSpec out;
  const std::size_t m = h.p_word.size();
  out.p_word.symbols.push_back(h.p_word[0]);
  for (std::size_t j = 1; j < m; ++j) out.p_word.symbols.push_back(h.p_word[m - j]);
  out.excursion = h.excursion.reversed();
  out.ell = h.ell;
  return out;
}

std::vector<Word> partition_prefixes(const Subshift& sub, int n) {
  constexpr std::uint64_t kTargetPartitions = 64;
  int len = 1;
  while (len < n && count_words(sub, len) < kTargetPartitions) ++len;
  return enumerate_words(sub, len);
}

namespace {

/// Keeps entries of a running product within range by exact power-of-two scaling.
void rescale_by_power_of_two(Matrix& m, int& exp2) {
  const double mx = m.cwiseAbs().maxCoeff();
  if (mx == 0.0 || (mx > 1e-150 && mx < 1e150)) return;
  int e = 0;
  std::frexp(mx, &e);
  m = (m.array() * std::ldexp(1.0, -e)).matrix();
  exp2 += e;
}

}  // namespace

void for_each_extension(const Cocycle& c, const Word& prefix, int n,
                        const std::function<void(const Word&, const Matrix&, int)>& visit) {
  if (prefix.empty() || static_cast<int>(prefix.size()) > n)
    throw std::invalid_argument("for_each_extension: prefix length must lie in 1..n");
  const int q = c.alphabet_size();
  const auto& sub = c.subshift();
  Word word = prefix;
  word.symbols.resize(static_cast<std::size_t>(n));
  std::vector<Matrix> products(static_cast<std::size_t>(n));
  std::vector<int> exps(static_cast<std::size_t>(n), 0);
  const auto step = [&](std::size_t i, int symbol) {
    products[i] = i == 0 ? c.generator(symbol) : Matrix(c.generator(symbol) * products[i - 1]);
    exps[i] = i == 0 ? 0 : exps[i - 1];
    rescale_by_power_of_two(products[i], exps[i]);
  };
  for (std::size_t i = 0; i < prefix.size(); ++i) step(i, prefix[i]);

  const auto p = prefix.size();
  if (static_cast<int>(p) == n) {
    visit(word, products[p - 1], exps[p - 1]);
    return;
  }
  // Iterative DFS over positions p .. n-1; next[i] is the candidate symbol at position i.
  std::vector<int> next(static_cast<std::size_t>(n), 0);
  std::size_t pos = p;
  next[pos] = 0;
  while (pos >= p) {
    int s = next[pos];
    while (s < q && !sub.allowed(word[pos - 1], s)) ++s;
    if (s >= q) {
      if (pos == p) break;
      --pos;
      ++next[pos];
      continue;
    }
    word.symbols[pos] = s;
    step(pos, s);
    if (static_cast<int>(pos) + 1 == n) {
      visit(word, products[pos], exps[pos]);
      next[pos] = s + 1;
    } else {
      next[pos] = s;
      ++pos;
      next[pos] = 0;
    }
  }
}

}  // namespace tfc
