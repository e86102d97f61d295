// Locally constant matrix cocycles over a subshift of finite type.
//
// Products follow the itinerary: for I = i_0 ... i_{n-1},
//   A(I) = A_{i_{n-1}} ... A_{i_1} A_{i_0}
// so later symbols multiply on the left.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tfc/matalg.hpp"
#include "tfc/symbolic.hpp"

namespace tfc {

/// Generators with condition number above this are rejected at construction.
constexpr double kMaxConditionNumber = 1e12;

class Cocycle {
 public:
  Cocycle(Subshift base, std::vector<Matrix> generators, double holder_alpha);

  const Subshift& subshift() const { return base_; }
  int alphabet_size() const { return base_.alphabet_size(); }
  int dim() const { return dim_; }
  const Matrix& generator(int symbol) const { return generators_[static_cast<std::size_t>(symbol)]; }
  const std::vector<Matrix>& generators() const { return generators_; }
  double holder_alpha() const { return holder_alpha_; }

  /// max(max_a ||A_a||, 1).
  double upsilon() const { return upsilon_; }
  /// min(min_a m(A_a), 1).
  double varrho() const { return varrho_; }
  /// max_a ||A_a|| without the clamp at 1.
  double max_norm() const { return max_norm_; }

  /// Stable 64-bit digest of the subshift and generator bits.
  std::uint64_t fingerprint() const;

 private:
  Subshift base_;
  std::vector<Matrix> generators_;
  double holder_alpha_;
  int dim_;
  double upsilon_;
  double varrho_;
  double max_norm_;
};

/// A(I). Rejects empty or inadmissible words.
Matrix evaluate_word(const Cocycle& c, const Word& w);

/// Log singular values of A(I).
std::vector<double> word_log_singular_values(const Cocycle& c, const Word& w);

double log_phi_word(const Cocycle& c, const Word& w, double s);
double phi_word(const Cocycle& c, const Word& w, double s);

/// max_a ||A_a|| ||A_a^{-1}|| theta^alpha; below 1 certifies fiber-bunching.
double fiber_bunching_margin(const Cocycle& c);

/// Generator depends on the (2k+1)-block x_{i-k} .. x_{i+k}.
class BlockCocycle {
 public:
  BlockCocycle(Subshift base, int radius, std::map<Word, Matrix> blocks, double holder_alpha);

  const Subshift& subshift() const { return base_; }
  int radius() const { return radius_; }
  int dim() const { return dim_; }
  double holder_alpha() const { return holder_alpha_; }
  const Matrix& generator(const Word& block) const;
  /// Admissible (2k+1)-blocks in lexicographic order.
  const std::vector<Word>& block_alphabet() const { return alphabet_; }

 private:
  Subshift base_;
  int radius_;
  std::map<Word, Matrix> blocks_;
  std::vector<Word> alphabet_;
  double holder_alpha_;
  int dim_;
};

/// One-step cocycle over the higher-block subshift: symbol j is block_alphabet()[j],
/// and block b may precede b' when b[1..2k] == b'[0..2k-1].
Cocycle recode(const BlockCocycle& b);

/// Maps an original word of length n + 2k to the recoded word of length n whose
/// symbols are the consecutive (2k+1)-blocks.
Word recode_word(const BlockCocycle& b, const Word& original);

/// Product of block generators at original positions k .. |w|-k-1.
Matrix evaluate_block_word(const BlockCocycle& b, const Word& original);

/// Eventually periodic symbol sequence starting at `first_index`: `head`, then `cycle` forever.
struct Ray {
  long first_index = 0;
  std::vector<int> head;
  std::vector<int> cycle;

  int at(long i) const;
  /// Rays agree at every index >= 0.
  bool agrees_from_zero(const Ray& other) const;
};

struct HolonomyResult {
  Matrix h;
  double residual = 0.0;  // ||H_N - H_{N-1}||
};

/// H_N = A^N(y)^{-1} A^N(x). For one-step cocycles this is exactly the identity.
HolonomyResult holonomy(const Cocycle& c, const Ray& x, const Ray& y, int n);
/// Block version; rays must start at index <= -k. Exact once N exceeds the last index
/// where the generating blocks differ.
HolonomyResult holonomy(const BlockCocycle& b, const Ray& x, const Ray& y, int n);

/// psi_p^z = A^l(p)^{-1} A^l(z); with a fixed point p this is P^{-l} A^l(z).
Matrix holonomy_loop(const Cocycle& c, const HomoclinicSpec& h);

/// Transposed generators over the transposed subshift.
Cocycle adjoint_cocycle(const Cocycle& c);

/// The same homoclinic orbit read backwards, expressed for the adjoint cocycle.
HomoclinicSpec adjoint_homoclinic(const HomoclinicSpec& h);

/// Lexicographic prefixes used to split L(n) into independent work units. Depends only on
/// the subshift and n.
std::vector<Word> partition_prefixes(const Subshift& sub, int n);

/// Visits every admissible word of length n that starts with `prefix`, in lexicographic
/// order, together with A(word) = product * 2^exp2. Products are rescaled by exact powers
/// of two only when their entries leave [1e-150, 1e150], so exp2 is usually 0.
void for_each_extension(const Cocycle& c, const Word& prefix, int n,
                        const std::function<void(const Word&, const Matrix& product, int exp2)>& visit);

}  // namespace tfc
