#include "tfc/symbolic.hpp"

#include <algorithm>
#include <stdexcept>

namespace tfc {

Word Word::operator+(const Word& other) const {
  Word out(symbols);
  out.symbols.insert(out.symbols.end(), other.symbols.begin(), other.symbols.end());
  return out;
}

Word Word::reversed() const { return Word(std::vector<int>(symbols.rbegin(), symbols.rend())); }

Word Word::slice(std::size_t pos, std::size_t len) const {
  if (pos + len > symbols.size()) throw std::out_of_range("Word::slice out of range");
  return Word(std::vector<int>(symbols.begin() + static_cast<std::ptrdiff_t>(pos),
                               symbols.begin() + static_cast<std::ptrdiff_t>(pos + len)));
}

std::string Word::str() const {
  const bool compact = std::all_of(symbols.begin(), symbols.end(), [](int s) { return s < 9; });
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (!compact && i > 0) out += '.';
    out += std::to_string(symbols[i] + 1);
  }
  return out;
}

Word Word::parse(std::string_view text, int q) {
  std::vector<int> out;
  auto push = [&](long v, std::string_view tok) {
    if (v < 1 || v > q)
      throw std::invalid_argument("symbol '" + std::string(tok) + "' outside 1.." + std::to_string(q));
    out.push_back(static_cast<int>(v - 1));
  };
  if (text.find('.') != std::string_view::npos) {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('.', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view tok = text.substr(start, end - start);
      if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
        throw std::invalid_argument("malformed word '" + std::string(text) + "'");
      push(std::stol(std::string(tok)), tok);
      start = end + 1;
    }
  } else {
    for (char ch : text) {
      if (ch < '0' || ch > '9') throw std::invalid_argument("malformed word '" + std::string(text) + "'");
      push(ch - '0', std::string_view(&ch, 1));
    }
  }
  return Word(std::move(out));
}

namespace {

using BoolMatrix = std::vector<std::vector<char>>;

BoolMatrix bool_product(const BoolMatrix& a, const BoolMatrix& b) {
  const std::size_t q = a.size();
  BoolMatrix out(q, std::vector<char>(q, 0));
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t k = 0; k < q; ++k)
      if (a[i][k])
        for (std::size_t j = 0; j < q; ++j) out[i][j] |= b[k][j];
  return out;
}

void check_square_01(const AdjacencyMatrix& t) {
  if (t.empty()) throw std::invalid_argument("adjacency matrix is empty");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].size() != t.size())
      throw std::invalid_argument("adjacency matrix is not square (row " + std::to_string(i + 1) + ")");
    for (std::size_t j = 0; j < t.size(); ++j)
      if (t[i][j] != 0 && t[i][j] != 1)
        throw std::invalid_argument("adjacency entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                    ") is not 0/1");
  }
}

}  // namespace

PrimitivityResult primitivity(const AdjacencyMatrix& t) {
  check_square_01(t);
  const std::size_t q = t.size();
  BoolMatrix base(q, std::vector<char>(q, 0));
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) base[i][j] = static_cast<char>(t[i][j]);
  BoolMatrix power = base;
  const std::size_t bound = q * q;
  for (std::size_t n = 1; n <= bound; ++n) {
    bool positive = true;
    for (const auto& row : power)
      positive = positive && std::all_of(row.begin(), row.end(), [](char v) { return v != 0; });
    if (positive) return {true, static_cast<int>(n)};
    power = bool_product(power, base);
  }
  return {false, std::nullopt};
}

Subshift::Subshift(AdjacencyMatrix adjacency, double theta) : adjacency_(std::move(adjacency)), theta_(theta) {
  check_square_01(adjacency_);
  if (!(theta_ > 0.0 && theta_ < 1.0)) throw std::invalid_argument("theta must lie in (0,1)");
  const std::size_t q = adjacency_.size();
  for (std::size_t i = 0; i < q; ++i) {
    bool row = false, col = false;
    for (std::size_t j = 0; j < q; ++j) {
      row = row || adjacency_[i][j];
      col = col || adjacency_[j][i];
    }
    if (!row || !col) throw std::invalid_argument("symbol " + std::to_string(i + 1) + " is dead (empty row or column)");
  }
  auto prim = primitivity(adjacency_);
  if (!prim.is_primitive)
    throw std::invalid_argument("adjacency matrix is not primitive within N <= q^2 = " + std::to_string(q * q));
  mixing_time_ = *prim.mixing_time;
}

Subshift Subshift::full(int q, double theta) {
  if (q < 1) throw std::invalid_argument("alphabet size must be positive");
  return Subshift(AdjacencyMatrix(q, std::vector<int>(q, 1)), theta);
}

std::optional<std::size_t> Subshift::first_violation(const Word& w) const {
  const int q = alphabet_size();
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] < 0 || w[i] >= q) return i;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (!allowed(w[i], w[i + 1])) return i;
  return std::nullopt;
}

bool Subshift::is_admissible(const Word& w) const { return !first_violation(w).has_value(); }

bool Subshift::is_cyclically_admissible(const Word& w) const {
  return !w.empty() && is_admissible(w) && allowed(w.back(), w.front());
}

Subshift Subshift::transposed() const {
  AdjacencyMatrix t(adjacency_.size(), std::vector<int>(adjacency_.size()));
  for (std::size_t i = 0; i < adjacency_.size(); ++i)
    for (std::size_t j = 0; j < adjacency_.size(); ++j) t[j][i] = adjacency_[i][j];
  return Subshift(std::move(t), theta_);
}

std::uint64_t count_words(const Subshift& sub, int n) {
  if (n < 1) throw std::invalid_argument("word length must be >= 1");
  const int q = sub.alphabet_size();
  std::vector<std::uint64_t> ending(q, 1);
  for (int step = 1; step < n; ++step) {
    std::vector<std::uint64_t> next(q, 0);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        if (sub.allowed(a, b) && __builtin_add_overflow(next[b], ending[a], &next[b]))
          throw std::overflow_error("word count overflows 64 bits");
    ending = std::move(next);
  }
  std::uint64_t total = 0;
  for (auto v : ending)
    if (__builtin_add_overflow(total, v, &total)) throw std::overflow_error("word count overflows 64 bits");
  return total;
}

WordEnumerator::WordEnumerator(const Subshift& sub, int n) : sub_(&sub), current_(static_cast<std::size_t>(n), 0) {
  if (n < 1) throw std::invalid_argument("word length must be >= 1");
}

// Fills positions >= pos with the lexicographically least admissible continuation,
// backtracking into earlier positions when needed. current_[0..pos) is admissible.
bool WordEnumerator::advance(std::size_t pos) {
  const int q = sub_->alphabet_size();
  const std::size_t n = current_.size();
  std::size_t i = pos;
  // current_[i] holds the candidate to try at position i.
  while (true) {
    if (i == n) return true;
    bool placed = false;
    for (int s = current_[i]; s < q; ++s) {
      if (i == 0 || sub_->allowed(current_[i - 1], s)) {
        current_[i] = s;
        placed = true;
        break;
      }
    }
    if (placed) {
      ++i;
      if (i < n) current_[i] = 0;
      continue;
    }
    if (i == 0) return false;
    --i;
    ++current_[i];
  }
}

bool WordEnumerator::next(Word& out) {
  if (done_) return false;
  bool ok;
  if (!started_) {
    started_ = true;
    ok = advance(0);
  } else {
    std::size_t last = current_.size() - 1;
    ++current_[last];
    ok = advance(last);
  }
  if (!ok) {
    done_ = true;
    return false;
  }
  out.symbols = current_;
  return true;
}

std::vector<Word> enumerate_words(const Subshift& sub, int n) {
  std::vector<Word> out;
  out.reserve(static_cast<std::size_t>(count_words(sub, n)));
  WordEnumerator e(sub, n);
  Word w;
  while (e.next(w)) out.push_back(w);
  return out;
}

std::vector<Word> enumerate_words_up_to(const Subshift& sub, int max_len) {
  std::vector<Word> out;
  for (int n = 1; n <= max_len; ++n) {
    auto level = enumerate_words(sub, n);
    out.insert(out.end(), std::make_move_iterator(level.begin()), std::make_move_iterator(level.end()));
  }
  return out;
}

std::optional<Word> connect(const Subshift& sub, int a, int b, int max_len) {
  const int q = sub.alphabet_size();
  if (a < 0 || a >= q || b < 0 || b >= q) throw std::invalid_argument("connect: symbol out of range");
  if (max_len < 0) return std::nullopt;
  // reach[m][x]: b is reachable from x in exactly m transitions.
  std::vector<std::vector<char>> reach(static_cast<std::size_t>(max_len) + 2, std::vector<char>(q, 0));
  reach[0][b] = 1;
  for (int m = 1; m <= max_len + 1; ++m)
    for (int x = 0; x < q; ++x)
      for (int y = 0; y < q && !reach[m][x]; ++y)
        if (sub.allowed(x, y) && reach[m - 1][y]) reach[m][x] = 1;
  for (int len = 0; len <= max_len; ++len) {
    if (!reach[len + 1][a]) continue;
    Word w;
    int cur = a;
    for (int pos = 0; pos < len; ++pos) {
      for (int y = 0; y < q; ++y)
        if (sub.allowed(cur, y) && reach[len - pos][y]) {
          w.symbols.push_back(y);
          cur = y;
          break;
        }
    }
    return w;
  }
  return std::nullopt;
}

Word HomoclinicSpec::z_block() const {
  Word z;
  z.symbols.push_back(p_word.front());
  z.symbols.insert(z.symbols.end(), excursion.symbols.begin(), excursion.symbols.end());
  return z;
}

void HomoclinicSpec::validate(const Subshift& sub) const {
  if (p_word.empty()) throw std::invalid_argument("homoclinic orbit: empty period word");
  if (!sub.is_cyclically_admissible(p_word))
    throw std::invalid_argument("homoclinic orbit: period word " + p_word.str() + " is not cyclically admissible");
  if (ell != 1 + static_cast<int>(excursion.size()))
    throw std::invalid_argument("homoclinic orbit: ell must equal 1 + |excursion|");
  if (ell % static_cast<int>(p_word.size()) != 0)
    throw std::invalid_argument("homoclinic orbit: ell must be a multiple of the period |p| so that f^ell z shadows p");
  Word z = z_block();
  if (auto bad = sub.first_violation(z))
    throw std::invalid_argument("homoclinic orbit: block " + z.str() + " forbidden at position " + std::to_string(*bad + 1));
  if (!sub.allowed(z.back(), p_word.front()))
    throw std::invalid_argument("homoclinic orbit: excursion cannot return to p");
}

}  // namespace tfc
