#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "papec/gf2.hpp"

using namespace papec::gf2;

TEST_CASE("bit vector basics") {
  const BitVector v = BitVector::from_string("110");
  CHECK(v.size() == 3);
  CHECK(v.basis_index() == 6);
  CHECK(v.str() == "110");
  CHECK(BitVector::from_basis_index(3, 6) == v);
  const BitVector w = BitVector::from_string("011");
  CHECK(v.dot(w) == 1);
  CHECK((v ^ w).str() == "101");
}

TEST_CASE("rank") {
  CHECK(rank(BitMatrix::identity(3)) == 3);
  CHECK(rank(BitMatrix(2, 4)) == 0);
  // 110 + 011 = 101: brute-force enumeration of row combinations gives 2.
  const BitMatrix m = BitMatrix::from_string("110;011;101");
  CHECK(rank(m) == 2);
}

TEST_CASE("kernel basis membership agreement") {
  // g = [11]: kernel spanned by 11 (enumerate all x in {0,1}^2).
  const BitMatrix g = BitMatrix::from_string("11");
  const auto basis = kernel_basis(g);
  REQUIRE(basis.size() == 1);
  CHECK(basis[0].str() == "11");

  CHECK(kernel_basis(BitMatrix::identity(4)).empty());
  CHECK(kernel_basis(BitMatrix::from_string("00")).size() == 2);

  // Brute-force agreement on random matrices, n <= 10.
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const int r = 1 + static_cast<int>(rng() % n);
    BitMatrix m(r, n);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < n; ++j) m.set(i, j, static_cast<int>(rng() & 1));
    const auto basis2 = kernel_basis(m);
    CHECK(static_cast<int>(basis2.size()) == n - rank(m));
    // span(basis) == {x : Mx = 0} by exhaustive membership check.
    std::vector<bool> in_span(1u << n, false);
    const int k = static_cast<int>(basis2.size());
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      BitVector x = BitVector::zero(n);
      for (int i = 0; i < k; ++i)
        if ((mask >> i) & 1u) x = x ^ basis2[i];
      in_span[x.basis_index()] = true;
    }
    for (std::uint32_t xi = 0; xi < (1u << n); ++xi) {
      const BitVector x = BitVector::from_basis_index(n, xi);
      CHECK(in_span[xi] == m.apply(x).is_zero());
    }
  }
}

TEST_CASE("check matrix completion") {
  const BitMatrix g = BitMatrix::from_string("10");
  const BitMatrix h = complete_check_matrix(g);
  REQUIRE(h.rows() == 1);
  CHECK(h.row(0).str() == "01");

  CHECK(complete_check_matrix(BitMatrix::identity(3)).rows() == 0);
  CHECK(complete_check_matrix(BitMatrix::from_string("11")).row(0).str() == "11");
  CHECK_THROWS(complete_check_matrix(BitMatrix::from_string("11;11")));
}

TEST_CASE("basis extension") {
  {
    const BitMatrix g = BitMatrix::from_string("10");
    const BitMatrix v = extend_basis(g, complete_check_matrix(g));
    CHECK(v == BitMatrix::identity(2));
  }
  {
    const BitMatrix g = BitMatrix::identity(3);
    CHECK(extend_basis(g, complete_check_matrix(g)) == g);
  }
  {
    const BitMatrix g = BitMatrix::from_string("110;011");
    const BitMatrix h = BitMatrix::from_string("111");
    const BitMatrix v = extend_basis(g, h);
    CHECK(rank(v) == 3);
    CHECK(v.row(0).str() == "110");
    CHECK(v.row(1).str() == "011");
    CHECK(v.row(2).dot(h.row(0)) == 1);
  }
  // v v^{-1} = I and the first m rows equal g, over random full-rank g.
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const int m = 1 + static_cast<int>(rng() % n);
    BitMatrix g(m, n);
    do {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) g.set(i, j, static_cast<int>(rng() & 1));
    } while (rank(g) != m);
    const BitMatrix h = complete_check_matrix(g);
    const BitMatrix v = extend_basis(g, h);
    CHECK(v.multiply(inverse(v)) == BitMatrix::identity(n));
    for (int i = 0; i < m; ++i) CHECK(v.row(i) == g.row(i));
    for (int i = 0; i < n - m; ++i)
      for (int j = 0; j < n - m; ++j) CHECK(v.row(m + i).dot(h.row(j)) == (i == j ? 1 : 0));
  }
}

TEST_CASE("toeplitz family") {
  // n=2, m=1: four candidates (t1,t2); dropping 00 leaves three full-rank
  // members with weight 1/3 each.
  const auto filtered = toeplitz_family(2, 1);
  CHECK(filtered.members.size() == 3);
  CHECK(filtered.probs[0] == Rational(1, 3));

  const auto single = toeplitz_family(1, 1);
  REQUIRE(single.members.size() == 1);
  CHECK(single.members[0].at(0, 0) == 1);
  CHECK(single.probs[0] == Rational(1, 1));

  const auto unfiltered = toeplitz_family(2, 1, ToeplitzFilter::kUnfiltered);
  CHECK(unfiltered.members.size() == 4);

  // n=3, m=2: enumerate all 2^4 Toeplitz matrices, keep the rank-2 ones.
  const auto f32 = toeplitz_family(3, 2);
  const auto u32 = toeplitz_family(3, 2, ToeplitzFilter::kUnfiltered);
  CHECK(u32.members.size() == 16);
  int full_rank = 0;
  for (const auto& mem : u32.members)
    if (rank(mem) == 2) ++full_rank;
  CHECK(static_cast<int>(f32.members.size()) == full_rank);
}

TEST_CASE("collision probability") {
  // Unfiltered Toeplitz 2->1: Pr[t . delta = 0] = 1/2 for delta != 0.
  const auto unfiltered = toeplitz_family(2, 1, ToeplitzFilter::kUnfiltered);
  CHECK(collision_probability(unfiltered) == Rational(1, 2));

  // A single fixed compressing matrix collides deterministically.
  LinearHashFamily fixed;
  fixed.n = 2;
  fixed.m = 1;
  fixed.members.push_back(BitMatrix::from_string("11"));
  fixed.probs.emplace_back(1, 1);
  CHECK(collision_probability(fixed) == Rational(1, 1));

  // Uniform over all full-row-rank 1x3 matrices stays below 2^-1.
  LinearHashFamily all;
  all.n = 3;
  all.m = 1;
  for (std::uint32_t r = 1; r < 8; ++r) {
    BitMatrix mm(1, 3);
    for (int j = 0; j < 3; ++j) mm.set(0, j, (r >> (2 - j)) & 1u);
    all.members.push_back(mm);
  }
  all.probs.assign(7, Rational(1, 7));
  CHECK(collision_probability(all) <= Rational(1, 2));
  CHECK(collision_probability(all) == Rational(3, 7));
}

TEST_CASE("collision probability matches all-pairs brute force") {
  // The difference-string reduction is exact for linear members; cross-check
  // against direct enumeration over ordered pairs.
  for (int n = 2; n <= 4; ++n)
    for (int m = 1; m <= std::min(3, n); ++m) {
      const auto fam = toeplitz_family(n, m, ToeplitzFilter::kUnfiltered);
      Rational best;
      for (std::uint32_t a = 0; a < (1u << n); ++a)
        for (std::uint32_t b = 0; b < (1u << n); ++b) {
          if (a == b) continue;
          Rational p;
          const auto av = BitVector::from_basis_index(n, a);
          const auto bv = BitVector::from_basis_index(n, b);
          for (size_t i = 0; i < fam.members.size(); ++i)
            if (fam.members[i].apply(av) == fam.members[i].apply(bv)) p = p + fam.probs[i];
          if (best < p) best = p;
        }
      CHECK(collision_probability(fam) == best);
    }
}

TEST_CASE("universal2 audit holds exactly up to n=8, m=3") {
  std::string detail;
  CHECK(toeplitz_universal2_audit(8, 3, &detail));
  CHECK(detail.empty());
}

TEST_CASE("bit matrix text round trip") {
  const BitMatrix m = BitMatrix::from_string("110;011");
  CHECK(m.str() == "110;011");
  CHECK(BitMatrix::from_string(m.str()) == m);
}
