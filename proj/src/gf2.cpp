#include "papec/gf2.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace papec::gf2 {

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  if (den_ <= 0) throw std::invalid_argument("Rational: denominator must be positive");
  if (num_ < 0) throw std::invalid_argument("Rational: negative values unsupported");
  std::int64_t g = std::gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational Rational::operator+(const Rational& o) const {
  return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
  return Rational(num_ * o.num_, den_ * o.den_);
}

bool Rational::operator<(const Rational& o) const {
  return static_cast<__int128>(num_) * o.den_ < static_cast<__int128>(o.num_) * den_;
}

std::string Rational::str() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

BitVector::BitVector(int size, std::uint32_t bits) : size_(size), bits_(bits) {
  if (size < 1 || size > 32) throw std::invalid_argument("BitVector: size must be in [1,32]");
  if (size < 32) bits_ &= (1u << size) - 1u;
}

BitVector BitVector::from_string(const std::string& s) {
  BitVector v(static_cast<int>(s.size()), 0);
  for (int i = 0; i < v.size_; ++i) {
    if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("BitVector: bad character");
    v.set_bit(i, s[i] - '0');
  }
  return v;
}

void BitVector::set_bit(int i, int v) {
  if (i < 0 || i >= size_) throw std::out_of_range("BitVector: bit index");
  if (v)
    bits_ |= (1u << i);
  else
    bits_ &= ~(1u << i);
}

BitVector BitVector::operator^(const BitVector& o) const {
  if (size_ != o.size_) throw std::invalid_argument("BitVector: size mismatch");
  return BitVector(size_, bits_ ^ o.bits_);
}

bool BitVector::operator<(const BitVector& o) const {
  if (size_ != o.size_) return size_ < o.size_;
  return basis_index() < o.basis_index();
}

int BitVector::dot(const BitVector& o) const {
  if (size_ != o.size_) throw std::invalid_argument("BitVector: size mismatch");
  return std::popcount(bits_ & o.bits_) & 1;
}

std::uint32_t BitVector::basis_index() const {
  std::uint32_t idx = 0;
  for (int i = 0; i < size_; ++i) idx = (idx << 1) | static_cast<std::uint32_t>(bit(i));
  return idx;
}

BitVector BitVector::from_basis_index(int size, std::uint32_t index) {
  BitVector v(size, 0);
  for (int i = 0; i < size; ++i) v.set_bit(i, (index >> (size - 1 - i)) & 1u);
  return v;
}

std::string BitVector::str() const {
  std::string s(size_, '0');
  for (int i = 0; i < size_; ++i) s[i] = static_cast<char>('0' + bit(i));
  return s;
}

BitMatrix::BitMatrix(int rows, int cols) : cols_(cols) {
  if (cols < 1) throw std::invalid_argument("BitMatrix: cols must be >= 1");
  rows_.assign(rows, BitVector::zero(cols));
}

BitMatrix::BitMatrix(std::vector<BitVector> rows, int cols) : rows_(std::move(rows)), cols_(cols) {
  for (const auto& r : rows_)
    if (r.size() != cols_) throw std::invalid_argument("BitMatrix: ragged rows");
}

BitMatrix BitMatrix::identity(int n) {
  BitMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

BitMatrix BitMatrix::from_string(const std::string& s) {
  std::vector<BitVector> rows;
  std::string cur;
  for (char c : s) {
    if (c == ';') {
      rows.push_back(BitVector::from_string(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) rows.push_back(BitVector::from_string(cur));
  if (rows.empty()) throw std::invalid_argument("BitMatrix: empty text form");
  return BitMatrix(rows, rows.front().size());
}

void BitMatrix::append_row(const BitVector& r) {
  if (r.size() != cols_) throw std::invalid_argument("BitMatrix: row size mismatch");
  rows_.push_back(r);
}

BitVector BitMatrix::apply(const BitVector& x) const {
  if (x.size() != cols_) throw std::invalid_argument("BitMatrix: apply size mismatch");
  if (rows_.empty()) throw std::invalid_argument("BitMatrix: apply on empty matrix");
  BitVector y(rows(), 0);
  for (int i = 0; i < rows(); ++i) y.set_bit(i, rows_[i].dot(x));
  return y;
}

BitMatrix BitMatrix::multiply(const BitMatrix& o) const {
  if (cols_ != o.rows()) throw std::invalid_argument("BitMatrix: multiply shape mismatch");
  BitMatrix c(rows(), o.cols());
  for (int i = 0; i < rows(); ++i)
    for (int k = 0; k < cols_; ++k)
      if (at(i, k))
        for (int j = 0; j < o.cols(); ++j) c.set(i, j, c.at(i, j) ^ o.at(k, j));
  return c;
}

BitMatrix BitMatrix::transpose() const {
  BitMatrix t(cols_, rows());
  for (int i = 0; i < rows(); ++i)
    for (int j = 0; j < cols_; ++j) t.set(j, i, at(i, j));
  return t;
}

bool BitMatrix::operator==(const BitMatrix& o) const {
  if (rows() != o.rows() || cols_ != o.cols()) return false;
  for (int i = 0; i < rows(); ++i)
    if (!(rows_[i] == o.rows_[i])) return false;
  return true;
}

std::string BitMatrix::str() const {
  std::string s;
  for (int i = 0; i < rows(); ++i) {
    if (i) s.push_back(';');
    s += rows_[i].str();
  }
  return s;
}

namespace {

// Row-echelon elimination on a copy; returns pivot column per eliminated row.
struct Echelon {
  std::vector<BitVector> rows;
  std::vector<int> pivot_cols;
};

Echelon eliminate(const BitMatrix& m) {
  Echelon e;
  for (int i = 0; i < m.rows(); ++i) e.rows.push_back(m.row(i));
  int r = 0;
  for (int c = 0; c < m.cols() && r < static_cast<int>(e.rows.size()); ++c) {
    int piv = -1;
    for (int i = r; i < static_cast<int>(e.rows.size()); ++i)
      if (e.rows[i].bit(c)) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(e.rows[r], e.rows[piv]);
    for (int i = 0; i < static_cast<int>(e.rows.size()); ++i)
      if (i != r && e.rows[i].bit(c)) e.rows[i] = e.rows[i] ^ e.rows[r];
    e.pivot_cols.push_back(c);
    ++r;
  }
  return e;
}

}  // namespace

int rank(const BitMatrix& m) {
  if (m.rows() == 0) return 0;
  return static_cast<int>(eliminate(m).pivot_cols.size());
}

std::vector<BitVector> kernel_basis(const BitMatrix& m) {
  const int n = m.cols();
  if (m.rows() == 0) {
    std::vector<BitVector> basis;
    for (int j = 0; j < n; ++j) {
      BitVector v = BitVector::zero(n);
      v.set_bit(j, 1);
      basis.push_back(v);
    }
    return basis;
  }
  Echelon e = eliminate(m);
  std::vector<bool> is_pivot(n, false);
  for (int c : e.pivot_cols) is_pivot[c] = true;
  std::vector<BitVector> basis;
  for (int j = 0; j < n; ++j) {
    if (is_pivot[j]) continue;
    BitVector v = BitVector::zero(n);
    v.set_bit(j, 1);
    // Back-substitute: pivot row i has its pivot at e.pivot_cols[i].
    for (int i = 0; i < static_cast<int>(e.pivot_cols.size()); ++i)
      if (e.rows[i].bit(j)) v.set_bit(e.pivot_cols[i], 1);
    basis.push_back(v);
  }
  return basis;
}

BitMatrix inverse(const BitMatrix& m) {
  const int n = m.cols();
  if (m.rows() != n) throw std::invalid_argument("inverse: matrix not square");
  // Augmented elimination [m | I].
  std::vector<BitVector> a;
  for (int i = 0; i < n; ++i) {
    BitVector row(2 * n, 0);
    for (int j = 0; j < n; ++j) row.set_bit(j, m.at(i, j));
    row.set_bit(n + i, 1);
    a.push_back(row);
  }
  int r = 0;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int i = r; i < n; ++i)
      if (a[i].bit(c)) {
        piv = i;
        break;
      }
    if (piv < 0) throw std::runtime_error("inverse: matrix is singular");
    std::swap(a[r], a[piv]);
    for (int i = 0; i < n; ++i)
      if (i != r && a[i].bit(c)) a[i] = a[i] ^ a[r];
    ++r;
  }
  BitMatrix inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv.set(i, j, a[i].bit(n + j));
  return inv;
}

bool solve(const BitMatrix& m, const BitVector& b, BitVector* out) {
  if (b.size() != m.rows()) throw std::invalid_argument("solve: rhs size mismatch");
  const int n = m.cols();
  std::vector<BitVector> a;
  for (int i = 0; i < m.rows(); ++i) {
    BitVector row(n + 1, 0);
    for (int j = 0; j < n; ++j) row.set_bit(j, m.at(i, j));
    row.set_bit(n, b.bit(i));
    a.push_back(row);
  }
  std::vector<int> pivot_cols;
  int r = 0;
  for (int c = 0; c < n && r < static_cast<int>(a.size()); ++c) {
    int piv = -1;
    for (int i = r; i < static_cast<int>(a.size()); ++i)
      if (a[i].bit(c)) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[r], a[piv]);
    for (int i = 0; i < static_cast<int>(a.size()); ++i)
      if (i != r && a[i].bit(c)) a[i] = a[i] ^ a[r];
    pivot_cols.push_back(c);
    ++r;
  }
  for (int i = r; i < static_cast<int>(a.size()); ++i)
    if (a[i].bit(n)) return false;
  BitVector x = BitVector::zero(n);
  for (int i = 0; i < r; ++i) x.set_bit(pivot_cols[i], a[i].bit(n));
  *out = x;
  return true;
}

BitMatrix complete_check_matrix(const BitMatrix& g) {
  const int n = g.cols();
  const int m = g.rows();
  if (rank(g) != m) throw std::invalid_argument("complete_check_matrix: g not full row rank");
  std::vector<BitVector> ker = kernel_basis(g);
  if (static_cast<int>(ker.size()) != n - m)
    throw std::runtime_error("complete_check_matrix: kernel dimension mismatch");
  BitMatrix h(0, n);
  for (const auto& v : ker) h.append_row(v);
  return h;
}

BitMatrix extend_basis(const BitMatrix& g, const BitMatrix& h) {
  const int n = g.cols();
  const int m = g.rows();
  if (h.cols() != n || h.rows() != n - m)
    throw std::invalid_argument("extend_basis: shape mismatch");
  BitMatrix v(0, n);
  for (int i = 0; i < m; ++i) v.append_row(g.row(i));
  for (int i = 0; i < n - m; ++i) {
    BitVector e = BitVector::zero(n - m);
    e.set_bit(i, 1);
    BitVector x = BitVector::zero(n);
    if (!solve(h, e, &x)) throw std::runtime_error("extend_basis: delta system unsolvable");
    v.append_row(x);
  }
  // Any solution of the delta system yields an invertible v: a vanishing
  // combination of rows has zero coefficients on the last n-m rows (pair
  // with h_j) and then on the first m (g full rank).
  if (rank(v) != n) throw std::runtime_error("extend_basis: completion not invertible");
  return v;
}

void LinearHashFamily::validate(bool require_full_rank) const {
  if (members.size() != probs.size())
    throw std::invalid_argument("LinearHashFamily: members/probs size mismatch");
  Rational total;
  for (size_t i = 0; i < members.size(); ++i) {
    if (members[i].rows() != m || members[i].cols() != n)
      throw std::invalid_argument("LinearHashFamily: member shape mismatch");
    if (require_full_rank && rank(members[i]) != m)
      throw std::invalid_argument("LinearHashFamily: member not surjective");
    total = total + probs[i];
  }
  if (!(total == Rational::from_int(1)))
    throw std::invalid_argument("LinearHashFamily: probabilities do not sum to 1");
}

LinearHashFamily toeplitz_family(int n, int m, ToeplitzFilter filter) {
  if (m > n || m < 1) throw std::invalid_argument("toeplitz_family: need 1 <= m <= n");
  const int params = n + m - 1;
  if (params > 24) throw std::invalid_argument("toeplitz_family: n+m-1 exceeds enumerability cap");
  const std::int64_t count = std::int64_t{1} << params;
  LinearHashFamily fam;
  fam.n = n;
  fam.m = m;
  for (std::int64_t t = 0; t < count; ++t) {
    BitMatrix mat(m, n);
    // Diagonal-constant fill: entry (i,j) is parameter i-j+n-1.
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) mat.set(i, j, (t >> (i - j + n - 1)) & 1);
    if (filter == ToeplitzFilter::kFullRankOnly && rank(mat) != m) continue;
    fam.members.push_back(std::move(mat));
  }
  const std::int64_t kept = static_cast<std::int64_t>(fam.members.size());
  if (kept == 0) throw std::runtime_error("toeplitz_family: no full-rank members");
  fam.probs.assign(fam.members.size(), Rational(1, kept));
  fam.validate(filter == ToeplitzFilter::kFullRankOnly);
  return fam;
}

Rational collision_probability(const LinearHashFamily& f) {
  if (f.n > 16) throw std::invalid_argument("collision_probability: 2^n cap exceeded");
  Rational best;
  const std::uint32_t total = 1u << f.n;
  for (std::uint32_t d = 1; d < total; ++d) {
    const BitVector delta = BitVector::from_basis_index(f.n, d);
    Rational p;
    for (size_t i = 0; i < f.members.size(); ++i)
      if (f.members[i].apply(delta).is_zero()) p = p + f.probs[i];
    if (best < p) best = p;
  }
  return best;
}

bool toeplitz_universal2_audit(int max_n, int max_m, std::string* detail) {
  for (int n = 1; n <= max_n; ++n) {
    for (int m = 1; m <= std::min(max_m, n); ++m) {
      const LinearHashFamily fam = toeplitz_family(n, m, ToeplitzFilter::kUnfiltered);
      const Rational p = collision_probability(fam);
      const Rational bound(1, std::int64_t{1} << m);
      if (!(p <= bound)) {
        if (detail)
          *detail = "n=" + std::to_string(n) + " m=" + std::to_string(m) + " collision=" +
                    p.str() + " bound=" + bound.str();
        return false;
      }
    }
  }
  return true;
}

}  // namespace papec::gf2
