#pragma once

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "papec/gf2.hpp"

// Dense complex tensor algebra on named registers: kets, operators,
// sub-normalized states, cq states, Kraus channels, purifications,
// twirling, and the Uhlmann unitary.

namespace papec::hilbert {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kMaxTotalDim = 1 << 14;

struct Register {
  std::string name;
  int dim = 0;
};

// Ordered list of named registers. Basis indices are row-major with the
// first register most significant, matching the Kronecker product order.
class SystemLayout {
 public:
  SystemLayout() = default;
  explicit SystemLayout(std::vector<Register> regs);
  static SystemLayout single(const std::string& name, int dim);

  int size() const { return static_cast<int>(regs_.size()); }
  const Register& reg(int i) const { return regs_.at(i); }
  int total_dim() const { return total_dim_; }
  int index_of(const std::string& name) const;
  bool has(const std::string& name) const;
  int dim_of(const std::string& name) const { return regs_[index_of(name)].dim; }

  SystemLayout concat(const SystemLayout& o) const;
  SystemLayout keep(const std::vector<std::string>& names) const;
  SystemLayout drop(const std::vector<std::string>& names) const;
  std::vector<std::string> names() const;
  std::vector<std::string> names_except(const std::vector<std::string>& excluded) const;

  bool operator==(const SystemLayout& o) const;

 private:
  std::vector<Register> regs_;
  int total_dim_ = 1;
};

// Index bookkeeping for a register subset: any global basis index splits as
// sub_offsets[i] + rest_offsets[j], where i runs row-major over the subset
// in the caller-given order and j over the remaining registers in layout
// order.
class Partition {
 public:
  Partition(const SystemLayout& layout, const std::vector<std::string>& sub);

  int sub_dim() const { return sub_dim_; }
  int rest_dim() const { return rest_dim_; }
  const std::vector<int>& sub_offsets() const { return sub_offsets_; }
  const std::vector<int>& rest_offsets() const { return rest_offsets_; }

 private:
  int sub_dim_ = 1;
  int rest_dim_ = 1;
  std::vector<int> sub_offsets_;
  std::vector<int> rest_offsets_;
};

struct Ket {
  SystemLayout layout;
  Vector amp;

  double norm2() const { return amp.squaredNorm(); }
};

// Acts on its own registers; embedding into a larger layout happens at
// application time, by register name.
struct Operator {
  SystemLayout layout;
  Matrix mat;
};

struct State {
  SystemLayout layout;
  Matrix mat;

  double trace() const { return mat.trace().real(); }
  // Hermitian within 1e-10, eigenvalues >= -1e-10, trace <= 1 + 1e-9.
  void validate() const;
};

// Classical-quantum sub-normalized state sum_a |a><a| x rho_E^a, stored as
// blocks keyed by the n-bit string a (basis index).
struct CqState {
  int n = 0;
  SystemLayout e_layout;
  std::map<std::uint32_t, Matrix> blocks;

  int a_dim() const { return 1 << n; }
  int e_dim() const { return e_layout.total_dim(); }
  double trace() const;
  Matrix Eve_average() const;  // sum_a rho_E^a
  State to_state(const std::string& a_name) const;
  void validate() const;
};

enum class Completeness { kTracePreserving, kTraceNonIncreasing };

struct KrausChannel {
  std::vector<Operator> kraus;
  Completeness completeness = Completeness::kTracePreserving;

  // Checks sum K^dag K = I (or <= I) on the joint register set, within tol.
  void validate(double tol = 1e-9) const;
};

// ----- linear algebra helpers -----

Matrix dagger(const Matrix& m);
Matrix hermitize(const Matrix& m);
Matrix kron(const Matrix& a, const Matrix& b);
// Principal square root of a PSD matrix (eigenvalues clamped at 0;
// negativity below -tol is an error).
Matrix sqrt_psd(const Matrix& m, double tol = 1e-9);
// m^{-1/2} on its support, zero off support.
Matrix pinv_sqrt_psd(const Matrix& m, double rel_cutoff = 1e-12);
// Eigenvalue clamp: values in [-tol, 0) -> 0; below -tol throws.
Matrix psd_clamp(const Matrix& m, double tol = 1e-9);
double min_eigenvalue(const Matrix& m);

// ----- construction -----

Ket basis_ket(const SystemLayout& layout, int index);
Ket zero_ket(const SystemLayout& layout);
// |x~> = 2^{-d/2} sum_z (-1)^{x.z} |z> on a fresh d-qubit register.
Ket phase_basis_ket(const gf2::BitVector& x, const std::string& name);

Ket tensor(const Ket& a, const Ket& b);
Operator tensor(const Operator& a, const Operator& b);
State tensor(const State& a, const State& b);

// Z^z and X^x on a 2^|z|-dimensional register.
Operator pauli_string_z(const gf2::BitVector& z, const std::string& name);
Operator pauli_string_x(const gf2::BitVector& x, const std::string& name);
// Projector |x~><x~| on a d-qubit register.
Operator phase_projector(const gf2::BitVector& x, const std::string& name);
// CNOT with control register `control` and target `target`, both d qubits:
// |z>|w> -> |z>|w + z>. Equals sum_x Z^x x |x~><x~| with the roles swapped.
Operator cnot(const std::string& control, const std::string& target, int d);
// sum_x |x~><x~|_a x X^x_c: copies the phase-basis value of `a` into `c`.
Operator x_basis_copy(const std::string& a, const std::string& c, int d);
// V|a> = |v a> for invertible v (column convention).
Operator permutation_unitary_from_gf2(const gf2::BitMatrix& v, const std::string& name);
Operator identity_op(const SystemLayout& layout);

KrausChannel z_measurement_channel(const std::string& name, int dim);
KrausChannel x_measurement_channel(const std::string& name, int d_qubits);

// ----- application -----

// op's registers must all exist in the target layout with matching dims.
Ket apply(const Operator& op, const Ket& psi);
State apply(const Operator& op, const State& rho);
State apply(const KrausChannel& ch, const State& rho);

// <a|_reg psi: drops the register.
Ket extract(const Ket& psi, const std::string& reg, int index);
Complex inner(const Ket& a, const Ket& b);

State partial_trace(const State& rho, const std::vector<std::string>& keep);
// rho on `keep` obtained directly from a ket.
State reduce_ket(const Ket& psi, const std::vector<std::string>& keep);
// Erases matrix elements off-diagonal in the given register's basis.
State dephase_z(const State& rho, const std::string& reg);

// Dense matrix of op embedded in `layout` (small layouts only).
Operator embed(const Operator& op, const SystemLayout& layout);

// ----- purification machinery -----

// |Psi> = sum_a |a>_A x |psi^a>_{E A1} x |a>_{A2}, with |psi^a> the
// eigendecomposition purification of rho_E^a and dim A1 = dim E.
Ket cq_purification(const CqState& cq, const std::string& a_name, const std::string& a1_name,
                    const std::string& a2_name);

struct SemiPurificationCheck {
  bool ok = false;
  double residual = 0.0;
};
// True iff Z-dephasing reg A of the (A,E)-reduction reproduces cq.
SemiPurificationCheck is_semi_purification(const Ket& phi, const CqState& cq,
                                           const std::string& a_name, double tol = 1e-9);

// Appends an ancilla |0...0> of the same dimension as reg A and applies
// CNOT_{A|anc}. Takes a semi-purification to a purification.
Ket twirl(const Ket& phi, const std::string& a_name, const std::string& anc_name);

struct UhlmannResult {
  Operator unitary;  // acts on the ancilla registers, in psi-layout order
  double overlap;    // <phi|(I x U)|psi>, real and >= 0
};
// Unitary U on `anc` maximizing <phi|(I x U)|psi>; the maximum equals
// ||sqrt(rho_psi) sqrt(rho_phi)||_1 of the reductions onto the complement.
UhlmannResult uhlmann_unitary(const Ket& psi, const Ket& phi,
                              const std::vector<std::string>& anc);

}  // namespace papec::hilbert
