// Subshifts of finite type: adjacency matrices, admissible words, primitivity.
//
// Symbols are 0-based everywhere inside the library. Anything that crosses the
// I/O boundary (Word::str, Word::parse, JSON files) uses 1-based symbols.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tfc {

using AdjacencyMatrix = std::vector<std::vector<int>>;

/// Finite sequence of 0-based symbol indices.
struct Word {
  std::vector<int> symbols;

  Word() = default;
  explicit Word(std::vector<int> s) : symbols(std::move(s)) {}

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  int operator[](std::size_t i) const { return symbols[i]; }
  int front() const { return symbols.front(); }
  int back() const { return symbols.back(); }

  Word operator+(const Word& other) const;
  Word reversed() const;
  /// Symbols [pos, pos+len).
  Word slice(std::size_t pos, std::size_t len) const;

  /// 1-based rendering: "121" when every symbol is a single digit, "1.10.3" otherwise.
  std::string str() const;
  /// Accepts both forms produced by str(). Symbols outside 1..q are rejected.
  static Word parse(std::string_view text, int q);

  auto operator<=>(const Word&) const = default;
};

struct PrimitivityResult {
  bool is_primitive = false;
  std::optional<int> mixing_time;
};

/// Least N <= q^2 with T^N entrywise positive. Throws on non-square or non-0/1 input.
PrimitivityResult primitivity(const AdjacencyMatrix& t);

class Subshift {
 public:
  /// Validates 0/1 entries, no dead symbols, primitivity, and theta in (0,1).
  Subshift(AdjacencyMatrix adjacency, double theta);

  static Subshift full(int q, double theta = 0.5);

  int alphabet_size() const { return static_cast<int>(adjacency_.size()); }
  const AdjacencyMatrix& adjacency() const { return adjacency_; }
  double theta() const { return theta_; }
  int mixing_time() const { return mixing_time_; }

  bool allowed(int a, int b) const { return adjacency_[a][b] != 0; }
  bool is_admissible(const Word& w) const;
  /// Admissible and the wrap-around transition back to the first symbol is allowed.
  bool is_cyclically_admissible(const Word& w) const;
  /// Index of the first forbidden transition (i, i+1), or nullopt.
  std::optional<std::size_t> first_violation(const Word& w) const;

  /// Subshift with the transposed adjacency (time reversal).
  Subshift transposed() const;

  bool operator==(const Subshift& other) const = default;

 private:
  AdjacencyMatrix adjacency_;
  double theta_;
  int mixing_time_;
};

/// Number of admissible words of length n (entry sum of T^{n-1}). Throws on n < 1 or overflow.
std::uint64_t count_words(const Subshift& sub, int n);

/// Lexicographic stream over L(n).
class WordEnumerator {
 public:
  WordEnumerator(const Subshift& sub, int n);
  /// Writes the next word into `out`; false once exhausted.
  bool next(Word& out);

 private:
  bool advance(std::size_t pos);

  const Subshift* sub_;
  std::vector<int> current_;
  bool started_ = false;
  bool done_ = false;
};

std::vector<Word> enumerate_words(const Subshift& sub, int n);

/// Every admissible word of length 1..max_len, ordered by length, then lexicographically.
std::vector<Word> enumerate_words_up_to(const Subshift& sub, int max_len);

/// Shortest (then lexicographically least) W with a·W·b admissible and |W| <= max_len.
std::optional<Word> connect(const Subshift& sub, int a, int b, int max_len);

/// Periodic point p, excursion b_1..b_{l-1}, and return time l. The homoclinic point z
/// reads ...ppp.(p_0 b_1 .. b_{l-1}) ppp... with z_0 = p_0.
struct HomoclinicSpec {
  Word p_word;
  Word excursion;
  int ell = 1;

  /// The l symbols z_0 .. z_{l-1}.
  Word z_block() const;
  /// Throws std::invalid_argument describing the first violated condition.
  void validate(const Subshift& sub) const;
};

}  // namespace tfc
