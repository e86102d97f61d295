#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "tfc/cocycle.hpp"

using namespace tfc;
using doctest::Approx;

namespace {

Word w(const char* text, int q = 2) { return Word::parse(text, q); }

Cocycle diagonal_pair() { return Cocycle(Subshift::full(2), {oracle::diag({2, 1}), oracle::diag({1, 3})}, 1.0); }

Cocycle random_cocycle(std::mt19937_64& rng, const AdjacencyMatrix& t, int d) {
  std::vector<Matrix> gens;
  for (std::size_t a = 0; a < t.size(); ++a) gens.push_back(oracle::random_matrix(rng, d));
  return Cocycle(Subshift(t, 0.5), gens, 1.0);
}

BlockCocycle random_block_cocycle(std::mt19937_64& rng, const Subshift& sub, int k, int d) {
  std::map<Word, Matrix> blocks;
  for (const auto& b : enumerate_words(sub, 2 * k + 1)) blocks.emplace(b, oracle::random_matrix(rng, d));
  return BlockCocycle(sub, k, std::move(blocks), 1.0);
}

}  // namespace

TEST_CASE("cocycle validation") {
  CHECK_THROWS_AS(Cocycle(Subshift::full(2), {oracle::diag({1, 1})}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Cocycle(Subshift::full(2), {oracle::diag({1, 1}), oracle::diag({1, 0})}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Cocycle(Subshift::full(2), {oracle::diag({1, 1}), oracle::diag({1, 1e-13})}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(Cocycle(Subshift::full(2), {oracle::diag({1, 1}), oracle::diag({1, 1, 1})}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(Cocycle(Subshift::full(2), {oracle::diag({1, 1}), oracle::diag({1, 1})}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Cocycle(Subshift::full(2), {oracle::diag({1, 1}), oracle::diag({1, 1})}, 1.5), std::invalid_argument);
  Matrix nan = oracle::diag({1, 1});
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(Cocycle(Subshift::full(2), {oracle::diag({1, 1}), nan}, 1.0), std::invalid_argument);
}

TEST_CASE("derived constants") {
  const auto c = diagonal_pair();
  CHECK(c.upsilon() == Approx(3.0));
  CHECK(c.varrho() == Approx(1.0));
  const Cocycle small(Subshift::full(2), {oracle::scalar(0.5), oracle::scalar(0.25)}, 1.0);
  CHECK(small.upsilon() == 1.0);
  CHECK(small.varrho() == Approx(0.25));
  CHECK(small.max_norm() == Approx(0.5));
}

TEST_CASE("fingerprint distinguishes cocycles") {
  const auto a = diagonal_pair();
  const auto b = diagonal_pair();
  CHECK(a.fingerprint() == b.fingerprint());
  const Cocycle other(Subshift::full(2), {oracle::diag({2, 1}), oracle::diag({1, 3.0000000001})}, 1.0);
  CHECK(a.fingerprint() != other.fingerprint());
  const Cocycle golden(Subshift({{1, 1}, {1, 0}}, 0.5), {oracle::diag({2, 1}), oracle::diag({1, 3})}, 1.0);
  CHECK(a.fingerprint() != golden.fingerprint());
}

TEST_CASE("evaluate_word examples") {
  const auto c = diagonal_pair();
  CHECK(evaluate_word(c, w("12")) == oracle::diag({2, 3}));
  CHECK(evaluate_word(c, w("2")) == c.generator(1));
  CHECK_THROWS_AS(evaluate_word(c, Word()), std::invalid_argument);
  const Cocycle golden(Subshift({{1, 1}, {1, 0}}, 0.5), {oracle::diag({2, 1}), oracle::diag({1, 3})}, 1.0);
  CHECK_THROWS_AS(evaluate_word(golden, w("122")), std::invalid_argument);
}

TEST_CASE("later symbols multiply on the left") {
  Matrix a(2, 2), b(2, 2);
  a << 1, 1, 0, 1;
  b << 1, 0, 1, 1;
  const Cocycle c(Subshift::full(2), {a, b}, 1.0);
  CHECK(evaluate_word(c, w("12")) == b * a);
  CHECK(evaluate_word(c, w("21")) == a * b);
}

TEST_CASE("cocycle equation matches the naive product") {
  std::mt19937_64 rng(101);
  const AdjacencyMatrix t{{1, 1, 0}, {0, 1, 1}, {1, 1, 1}};
  const auto c = random_cocycle(rng, t, 3);
  const auto words = oracle::words(t, 5);
  for (const auto& seq : words) {
    const Word x(seq);
    CHECK(evaluate_word(c, x) == oracle::product(c.generators(), seq));
    for (std::size_t cut = 1; cut < x.size(); ++cut) {
      const Word head = x.slice(0, cut), tail = x.slice(cut, x.size() - cut);
      CHECK((evaluate_word(c, x) - evaluate_word(c, tail) * evaluate_word(c, head)).norm() <= 1e-12 * evaluate_word(c, x).norm());
    }
  }
}

TEST_CASE("phi_word examples") {
  const Cocycle id(Subshift::full(2), {Matrix::Identity(2, 2), Matrix::Identity(2, 2)}, 1.0);
  for (double s : {0.0, 0.7, 2.0, 3.5}) CHECK(phi_word(id, w("1212"), s) == Approx(1.0));
  const auto c = diagonal_pair();
  CHECK(phi_word(c, w("11"), 1.0) == Approx(4.0));
  CHECK(phi_word(c, w("11"), 1.5) == Approx(4.0));
}

TEST_CASE("phi_word is submultiplicative over concatenation") {
  std::mt19937_64 rng(7);
  const AdjacencyMatrix t{{1, 1}, {1, 0}};
  const auto c = random_cocycle(rng, t, 2);
  const auto short_words = enumerate_words_up_to(c.subshift(), 5);
  for (const auto& i : short_words)
    for (const auto& j : short_words) {
      const Word ij = i + j;
      if (!c.subshift().is_admissible(ij)) continue;
      for (double s : {0.5, 1.0, 1.5, 2.0, 3.0})
        CHECK(phi_word(c, ij, s) <= phi_word(c, i, s) * phi_word(c, j, s) * (1 + 1e-10));
    }
}

TEST_CASE("fiber_bunching_margin examples") {
  const Cocycle id(Subshift::full(2), {Matrix::Identity(2, 2), Matrix::Identity(2, 2)}, 1.0);
  CHECK(fiber_bunching_margin(id) == Approx(0.5));
  const Cocycle d1(Subshift::full(2), {oracle::diag({2, 1}), Matrix::Identity(2, 2)}, 1.0);
  CHECK(fiber_bunching_margin(d1) == Approx(1.0));
  const Cocycle conformal(Subshift(oracle::full_adjacency(2), 0.3),
                          {3.0 * oracle::rotation(0.4), 0.5 * oracle::rotation(2.0)}, 0.5);
  CHECK(fiber_bunching_margin(conformal) == Approx(std::pow(0.3, 0.5)));
}

TEST_CASE("recode with radius 0 is the same cocycle") {
  std::mt19937_64 rng(3);
  const Subshift golden({{1, 1}, {1, 0}}, 0.5);
  const auto b = random_block_cocycle(rng, golden, 0, 2);
  const auto c = recode(b);
  CHECK(c.subshift().adjacency() == golden.adjacency());
  for (int a = 0; a < 2; ++a) CHECK(c.generator(a) == b.generator(Word({a})));
}

TEST_CASE("recode of the full 2-shift at radius 1") {
  std::mt19937_64 rng(5);
  const auto b = random_block_cocycle(rng, Subshift::full(2), 1, 2);
  const auto c = recode(b);
  REQUIRE(c.alphabet_size() == 8);
  const auto& alpha = b.block_alphabet();
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      const bool overlap = alpha[i][1] == alpha[j][0] && alpha[i][2] == alpha[j][1];
      CHECK(c.subshift().allowed(static_cast<int>(i), static_cast<int>(j)) == overlap);
    }
  CHECK(alpha.front().str() == "111");
  CHECK(alpha.back().str() == "222");
}

TEST_CASE("recoded products equal block products") {
  std::mt19937_64 rng(9);
  const Subshift golden({{1, 1}, {1, 0}}, 0.5);
  const auto b = random_block_cocycle(rng, golden, 1, 2);
  const auto c = recode(b);
  for (const auto& seq : oracle::words(golden.adjacency(), 7)) {
    const Word x(seq);
    // Direct block product: generator at position i reads x_{i-1} x_i x_{i+1}.
    Matrix direct = Matrix::Identity(2, 2);
    for (std::size_t i = 1; i + 1 < seq.size(); ++i) direct = b.generator(x.slice(i - 1, 3)) * direct;
    CHECK((evaluate_word(c, recode_word(b, x)) - direct).norm() <= 1e-12 * direct.norm());
    CHECK((evaluate_block_word(b, x) - direct).norm() <= 1e-12 * direct.norm());
  }
}

TEST_CASE("block cocycle requires every admissible block") {
  std::map<Word, Matrix> blocks{{w("11"), oracle::diag({1, 1})}};
  CHECK_THROWS_AS(BlockCocycle(Subshift::full(2), 0, blocks, 1.0), std::invalid_argument);
}

TEST_CASE("one-step holonomy is the identity") {
  const auto c = diagonal_pair();
  const Ray x{-3, {1, 0, 1}, {0, 1}};
  const Ray y{-2, {0, 0}, {0, 1}};
  for (int n : {1, 5, 20}) {
    const auto r = holonomy(c, x, y, n);
    CHECK(r.h == Matrix::Identity(2, 2));
    CHECK(r.residual == 0.0);
    CHECK(holonomy(c, x, x, n).h == Matrix::Identity(2, 2));
  }
  const Ray z{0, {1}, {0, 1}};
  CHECK_THROWS_AS(holonomy(c, x, z, 3), std::invalid_argument);
}

TEST_CASE("block holonomy stabilizes exactly past the radius") {
  std::mt19937_64 rng(13);
  const auto b = random_block_cocycle(rng, Subshift::full(2), 1, 2);
  // x and y differ only at index -1.
  const Ray x{-3, {0, 0}, {1, 0}};
  const Ray y{-3, {0, 1}, {1, 0}};
  auto direct = [&](const Ray& r, int n) {
    Matrix m = Matrix::Identity(2, 2);
    for (long i = 0; i < n; ++i) {
      Word blk({r.at(i - 1), r.at(i), r.at(i + 1)});
      m = b.generator(blk) * m;
    }
    return m;
  };
  Matrix last;
  for (int n = 1; n <= 3; ++n) {
    const auto r = holonomy(b, x, y, n);
    const Matrix want = direct(y, n).inverse() * direct(x, n);
    CHECK((r.h - want).norm() <= 1e-12 * want.norm());
    if (n >= 2) CHECK(r.residual <= 1e-12);
    last = r.h;
  }
  CHECK((holonomy(b, x, y, 20).h - last).norm() <= 1e-12 * last.norm());
  CHECK(holonomy(b, x, x, 5).h == Matrix::Identity(2, 2));
}

TEST_CASE("holonomy_loop example") {
  Matrix a2(2, 2);
  a2 << 1, 1, 1, 2;
  const Cocycle c(Subshift::full(2), {oracle::diag({2, 1}), a2}, 1.0);
  const HomoclinicSpec h{w("1"), w("2"), 2};
  const Matrix psi = holonomy_loop(c, h);
  // P^{-2} A2 A1 by hand: diag(1/4, 1) [[2, 1], [2, 2]].
  Matrix want(2, 2);
  want << 0.5, 0.25, 2.0, 2.0;
  CHECK((psi - want).norm() <= 1e-15);
}

TEST_CASE("holonomy_loop is the identity for a trivial excursion") {
  const auto c = diagonal_pair();
  const HomoclinicSpec h{w("1"), w("11"), 3};
  CHECK((holonomy_loop(c, h) - Matrix::Identity(2, 2)).norm() <= 1e-15);
  const HomoclinicSpec h2{w("12"), w("2"), 2};
  CHECK((holonomy_loop(c, h2) - Matrix::Identity(2, 2)).norm() <= 1e-15);
}

TEST_CASE("holonomy_loop conjugation covariance") {
  // Delaying the excursion by r steps of the fixed point conjugates the loop by P^r.
  std::mt19937_64 rng(19);
  const Matrix p = oracle::random_matrix(rng, 2);
  const Matrix b = oracle::random_matrix(rng, 2);
  const Cocycle c(Subshift::full(2), {p, b}, 1.0);
  const Matrix psi = holonomy_loop(c, HomoclinicSpec{w("1"), w("2"), 2});
  Matrix pr = Matrix::Identity(2, 2);
  std::string excursion = "2";
  for (int r = 1; r <= 3; ++r) {
    pr = p * pr;
    excursion = "1" + excursion;
    const Matrix shifted = holonomy_loop(c, HomoclinicSpec{w("1"), Word::parse(excursion, 2), r + 2});
    const Matrix want = pr.inverse() * psi * pr;
    CHECK((pr * shifted - psi * pr).norm() <= 1e-11 * psi.norm() * pr.norm());
    CHECK((shifted - want).norm() <= 1e-10 * want.norm());
  }
}

TEST_CASE("adjoint cocycle") {
  std::mt19937_64 rng(29);
  const AdjacencyMatrix t{{1, 1, 0}, {0, 1, 1}, {1, 1, 1}};
  const auto c = random_cocycle(rng, t, 2);
  const auto a = adjoint_cocycle(c);
  CHECK(a.subshift().adjacency()[0][2] == 1);
  CHECK(a.subshift().adjacency()[2][0] == 0);
  for (const auto& seq : oracle::words(t, 4)) {
    const Word x(seq);
    CHECK(phi_word(a, x.reversed(), 1.0) == Approx(phi_word(c, x, 1.0)).epsilon(1e-12));
    CHECK(phi_word(a, x.reversed(), 1.5) == Approx(phi_word(c, x, 1.5)).epsilon(1e-12));
  }
  const auto aa = adjoint_cocycle(a);
  CHECK(aa.fingerprint() == c.fingerprint());
  Matrix s(2, 2);
  s << 2, 1, 1, 3;
  const Cocycle sym(Subshift::full(2), {s, oracle::diag({1, 2})}, 1.0);
  CHECK(adjoint_cocycle(sym).fingerprint() == sym.fingerprint());
}

TEST_CASE("adjoint homoclinic reads the orbit backwards") {
  const HomoclinicSpec h{w("12", 3), w("3", 3), 2};
  const auto a = adjoint_homoclinic(h);
  CHECK(a.p_word.str() == "12");
  CHECK(a.excursion.str() == "3");
  const HomoclinicSpec h3{w("123", 3), w("31", 3), 3};
  CHECK(adjoint_homoclinic(h3).p_word.str() == "132");
  CHECK(adjoint_homoclinic(h3).excursion.str() == "13");
}

TEST_CASE("partition prefixes and extensions cover L(n) in order") {
  std::mt19937_64 rng(37);
  const AdjacencyMatrix t{{1, 1, 0}, {0, 1, 1}, {1, 1, 1}};
  const auto c = random_cocycle(rng, t, 2);
  for (int n : {1, 3, 6}) {
    std::vector<std::vector<int>> seen;
    for (const auto& prefix : partition_prefixes(c.subshift(), n))
      for_each_extension(c, prefix, n, [&](const Word& x, const Matrix& m, int exp2) {
        seen.push_back(x.symbols);
        CHECK(exp2 == 0);
        CHECK(m == oracle::product(c.generators(), x.symbols));
      });
    CHECK(seen == oracle::words(t, n));
  }
}

TEST_CASE("extension products rescale exactly by powers of two") {
  const Cocycle big(Subshift::full(2), {oracle::scalar(1e30), oracle::scalar(2e30)}, 1.0);
  for_each_extension(big, Word({0}), 12, [&](const Word& x, const Matrix& m, int exp2) {
    double log_true = 0.0;
    for (int a : x.symbols) log_true += std::log(a == 0 ? 1e30 : 2e30);
    CHECK(std::isfinite(m(0, 0)));
    CHECK(std::log(m(0, 0)) + exp2 * std::log(2.0) == Approx(log_true).epsilon(1e-14));
  });
}
