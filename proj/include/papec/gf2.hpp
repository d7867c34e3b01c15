#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Exact linear algebra over GF(2): bit vectors/matrices, rank and kernel
// computations, check-matrix and basis completion, Toeplitz hash families,
// and exact (rational) collision-probability audits.

namespace papec::gf2 {

// Exact nonnegative rational, normalized. Denominators stay small here
// (family sizes are at most 2^24, probability sums bounded by 1), so
// int64 with a gcd after every operation is enough.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t num, std::int64_t den);
  static Rational from_int(std::int64_t v) { return Rational(v, 1); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator+(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator<(const Rational& o) const;
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }

  std::string str() const;

 private:
  std::int64_t num_, den_;
};

// Bit string of length 1..32, bit(i) is the i-th character of the string
// form, so "110" has bit(0)=1, bit(1)=1, bit(2)=0.
class BitVector {
 public:
  BitVector() : size_(0), bits_(0) {}
  BitVector(int size, std::uint32_t bits);
  static BitVector zero(int size) { return BitVector(size, 0); }
  static BitVector from_string(const std::string& s);

  int size() const { return size_; }
  std::uint32_t mask() const { return bits_; }
  int bit(int i) const { return (bits_ >> i) & 1u; }
  void set_bit(int i, int v);
  bool is_zero() const { return bits_ == 0; }

  BitVector operator^(const BitVector& o) const;
  bool operator==(const BitVector& o) const { return size_ == o.size_ && bits_ == o.bits_; }
  bool operator<(const BitVector& o) const;

  // Inner product mod 2.
  int dot(const BitVector& o) const;

  // Basis-state index under the big-endian convention |b_0 b_1 ... b_{d-1}>:
  // "110" -> 6.
  std::uint32_t basis_index() const;
  static BitVector from_basis_index(int size, std::uint32_t index);

  std::string str() const;

 private:
  int size_;
  std::uint32_t bits_;
};

class BitMatrix {
 public:
  BitMatrix() : cols_(0) {}
  BitMatrix(int rows, int cols);
  BitMatrix(std::vector<BitVector> rows, int cols);
  static BitMatrix identity(int n);
  // Rows separated by ';', e.g. "110;011".
  static BitMatrix from_string(const std::string& s);

  int rows() const { return static_cast<int>(rows_.size()); }
  int cols() const { return cols_; }
  const BitVector& row(int i) const { return rows_[i]; }
  void set(int i, int j, int v) { rows_[i].set_bit(j, v); }
  int at(int i, int j) const { return rows_[i].bit(j); }
  void append_row(const BitVector& r);

  // y = M x (column convention); y_i = row_i . x.
  BitVector apply(const BitVector& x) const;
  BitMatrix multiply(const BitMatrix& o) const;
  BitMatrix transpose() const;
  bool operator==(const BitMatrix& o) const;

  std::string str() const;

 private:
  std::vector<BitVector> rows_;
  int cols_;
};

// GF(2) row rank (Gaussian elimination, pivots on lowest row/column index).
int rank(const BitMatrix& m);

// Basis of {x : M x = 0}; size cols - rank.
std::vector<BitVector> kernel_basis(const BitMatrix& m);

// Inverse of a square invertible matrix; throws if singular.
BitMatrix inverse(const BitMatrix& m);

// Particular solution of M x = b, or empty if inconsistent.
bool solve(const BitMatrix& m, const BitVector& b, BitVector* out);

// For full-row-rank g (m x n), an (n-m) x n matrix h with h g^T = 0 whose
// rows form a basis of ker g. Throws if g is not full row rank.
BitMatrix complete_check_matrix(const BitMatrix& g);

// Completes g (m x n) and h ((n-m) x n, h g^T = 0) to an invertible n x n
// matrix v whose first m rows are g's rows and whose remaining rows x_i
// satisfy x_i . h_j = delta_ij. The delta-system solution is always
// invertible when the rank preconditions hold; this is asserted.
BitMatrix extend_basis(const BitMatrix& g, const BitMatrix& h);

// Hash family g: {0,1}^n -> {0,1}^m with explicit members and exact
// probabilities summing to 1.
struct LinearHashFamily {
  int n = 0;
  int m = 0;
  std::vector<BitMatrix> members;
  std::vector<Rational> probs;

  void validate(bool require_full_rank) const;
};

enum class ToeplitzFilter { kFullRankOnly, kUnfiltered };

// All 2^(n+m-1) Toeplitz m x n matrices, uniformly weighted. The default
// filter keeps only full-row-rank members with renormalized probabilities;
// the unfiltered variant is what the universal2 audit runs on, since
// filtering can break the exact 2^-m collision bound.
LinearHashFamily toeplitz_family(int n, int m,
                                 ToeplitzFilter filter = ToeplitzFilter::kFullRankOnly);

// max over a != a' of sum_g p(g) [g(a) = g(a')], exact. Members are linear,
// so the collision event depends only on a ^ a' and the maximum is taken
// over nonzero difference strings.
Rational collision_probability(const LinearHashFamily& f);

// Exhaustive audit: collision_probability(unfiltered toeplitz(n', m')) <=
// 2^-m' exactly, for all n' <= max_n, m' <= min(max_m, n'). Returns false
// on the first violation (reported via *detail if given).
bool toeplitz_universal2_audit(int max_n, int max_m, std::string* detail = nullptr);

}  // namespace papec::gf2
