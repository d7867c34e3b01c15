#include "papec/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace papec::hilbert {

namespace {

std::vector<int> layout_strides(const SystemLayout& l) {
  std::vector<int> strides(l.size());
  int s = 1;
  for (int r = l.size() - 1; r >= 0; --r) {
    strides[r] = s;
    s *= l.reg(r).dim;
  }
  return strides;
}

int qubit_count(int dim) {
  int d = 0;
  while ((1 << d) < dim) ++d;
  if ((1 << d) != dim) throw std::invalid_argument("register dimension is not a power of two");
  return d;
}

}  // namespace

SystemLayout::SystemLayout(std::vector<Register> regs) : regs_(std::move(regs)) {
  std::set<std::string> seen;
  for (const auto& r : regs_) {
    if (r.dim < 1) throw std::invalid_argument("SystemLayout: register dim must be >= 1");
    if (!seen.insert(r.name).second)
      throw std::invalid_argument("SystemLayout: duplicate register name " + r.name);
    total_dim_ *= r.dim;
    if (total_dim_ > kMaxTotalDim) throw std::invalid_argument("SystemLayout: dimension cap exceeded");
  }
}

SystemLayout SystemLayout::single(const std::string& name, int dim) {
  return SystemLayout({{name, dim}});
}

int SystemLayout::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (regs_[i].name == name) return i;
  throw std::invalid_argument("SystemLayout: unknown register " + name);
}

bool SystemLayout::has(const std::string& name) const {
  for (const auto& r : regs_)
    if (r.name == name) return true;
  return false;
}

SystemLayout SystemLayout::concat(const SystemLayout& o) const {
  std::vector<Register> regs = regs_;
  for (const auto& r : o.regs_) regs.push_back(r);
  return SystemLayout(regs);
}

SystemLayout SystemLayout::keep(const std::vector<std::string>& names) const {
  std::set<std::string> want(names.begin(), names.end());
  for (const auto& n : names) (void)index_of(n);
  std::vector<Register> regs;
  for (const auto& r : regs_)
    if (want.count(r.name)) regs.push_back(r);
  return SystemLayout(regs);
}

SystemLayout SystemLayout::drop(const std::vector<std::string>& names) const {
  std::set<std::string> del(names.begin(), names.end());
  for (const auto& n : names) (void)index_of(n);
  std::vector<Register> regs;
  for (const auto& r : regs_)
    if (!del.count(r.name)) regs.push_back(r);
  return SystemLayout(regs);
}

std::vector<std::string> SystemLayout::names() const {
  std::vector<std::string> out;
  for (const auto& r : regs_) out.push_back(r.name);
  return out;
}

std::vector<std::string> SystemLayout::names_except(
    const std::vector<std::string>& excluded) const {
  std::set<std::string> del(excluded.begin(), excluded.end());
  std::vector<std::string> out;
  for (const auto& r : regs_)
    if (!del.count(r.name)) out.push_back(r.name);
  return out;
}

bool SystemLayout::operator==(const SystemLayout& o) const {
  if (size() != o.size()) return false;
  for (int i = 0; i < size(); ++i)
    if (regs_[i].name != o.regs_[i].name || regs_[i].dim != o.regs_[i].dim) return false;
  return true;
}

Partition::Partition(const SystemLayout& layout, const std::vector<std::string>& sub) {
  const std::vector<int> strides = layout_strides(layout);
  std::vector<int> sub_ids;
  std::set<int> sub_set;
  for (const auto& name : sub) {
    int id = layout.index_of(name);
    if (!sub_set.insert(id).second) throw std::invalid_argument("Partition: duplicate register");
    sub_ids.push_back(id);
  }
  for (int id : sub_ids) sub_dim_ *= layout.reg(id).dim;
  for (int r = 0; r < layout.size(); ++r)
    if (!sub_set.count(r)) rest_dim_ *= layout.reg(r).dim;

  sub_offsets_.assign(sub_dim_, 0);
  for (int i = 0; i < sub_dim_; ++i) {
    int rem = i, off = 0;
    for (int k = static_cast<int>(sub_ids.size()) - 1; k >= 0; --k) {
      const int d = layout.reg(sub_ids[k]).dim;
      off += (rem % d) * strides[sub_ids[k]];
      rem /= d;
    }
    sub_offsets_[i] = off;
  }
  rest_offsets_.assign(rest_dim_, 0);
  std::vector<int> rest_ids;
  for (int r = 0; r < layout.size(); ++r)
    if (!sub_set.count(r)) rest_ids.push_back(r);
  for (int j = 0; j < rest_dim_; ++j) {
    int rem = j, off = 0;
    for (int k = static_cast<int>(rest_ids.size()) - 1; k >= 0; --k) {
      const int d = layout.reg(rest_ids[k]).dim;
      off += (rem % d) * strides[rest_ids[k]];
      rem /= d;
    }
    rest_offsets_[j] = off;
  }
}

void State::validate() const {
  if (mat.rows() != layout.total_dim() || mat.cols() != layout.total_dim())
    throw std::invalid_argument("State: matrix/layout dimension mismatch");
  if ((mat - dagger(mat)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::runtime_error("State: not Hermitian");
  if (min_eigenvalue(hermitize(mat)) < -1e-10) throw std::runtime_error("State: negative eigenvalue");
  if (trace() > 1.0 + 1e-9) throw std::runtime_error("State: trace exceeds 1");
}

double CqState::trace() const {
  double t = 0;
  for (const auto& [a, b] : blocks) t += b.trace().real();
  return t;
}

Matrix CqState::Eve_average() const {
  Matrix s = Matrix::Zero(e_dim(), e_dim());
  for (const auto& [a, b] : blocks) s += b;
  return s;
}

State CqState::to_state(const std::string& a_name) const {
  const int da = a_dim(), de = e_dim();
  State out;
  out.layout = SystemLayout::single(a_name, da).concat(e_layout);
  out.mat = Matrix::Zero(da * de, da * de);
  for (const auto& [a, b] : blocks)
    out.mat.block(static_cast<int>(a) * de, static_cast<int>(a) * de, de, de) = b;
  return out;
}

void CqState::validate() const {
  double t = 0;
  for (const auto& [a, b] : blocks) {
    if (a >= static_cast<std::uint32_t>(a_dim())) throw std::invalid_argument("CqState: key out of range");
    if (b.rows() != e_dim() || b.cols() != e_dim())
      throw std::invalid_argument("CqState: block dimension mismatch");
    if ((b - dagger(b)).cwiseAbs().maxCoeff() > 1e-10) throw std::runtime_error("CqState: block not Hermitian");
    if (min_eigenvalue(hermitize(b)) < -1e-10) throw std::runtime_error("CqState: block not PSD");
    t += b.trace().real();
  }
  if (t > 1.0 + 1e-9) throw std::runtime_error("CqState: trace exceeds 1");
}

void KrausChannel::validate(double tol) const {
  if (kraus.empty()) throw std::invalid_argument("KrausChannel: empty");
  const SystemLayout& l = kraus.front().layout;
  Matrix acc = Matrix::Zero(l.total_dim(), l.total_dim());
  for (const auto& k : kraus) {
    if (!(k.layout == l)) throw std::invalid_argument("KrausChannel: mixed layouts");
    acc += dagger(k.mat) * k.mat;
  }
  const Matrix diff = acc - Matrix::Identity(l.total_dim(), l.total_dim());
  if (completeness == Completeness::kTracePreserving) {
    if (diff.cwiseAbs().maxCoeff() > tol) throw std::runtime_error("KrausChannel: not trace preserving");
  } else {
    if (min_eigenvalue(hermitize(-diff)) < -tol)
      throw std::runtime_error("KrausChannel: completeness sum exceeds identity");
  }
}

Matrix dagger(const Matrix& m) { return m.adjoint(); }

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix sqrt_psd(const Matrix& m, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol) throw std::runtime_error("sqrt_psd: matrix not PSD");
    ev(i) = std::sqrt(std::max(0.0, ev(i)));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix pinv_sqrt_psd(const Matrix& m, double rel_cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
  Eigen::VectorXd ev = es.eigenvalues();
  const double cutoff = rel_cutoff * std::max(1e-300, ev.cwiseAbs().maxCoeff());
  for (int i = 0; i < ev.size(); ++i) ev(i) = ev(i) > cutoff ? 1.0 / std::sqrt(ev(i)) : 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix psd_clamp(const Matrix& m, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol) throw std::runtime_error("psd_clamp: negativity beyond tolerance");
    ev(i) = std::max(0.0, ev(i));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Ket basis_ket(const SystemLayout& layout, int index) {
  Ket k{layout, Vector::Zero(layout.total_dim())};
  k.amp(index) = 1.0;
  return k;
}

Ket zero_ket(const SystemLayout& layout) { return Ket{layout, Vector::Zero(layout.total_dim())}; }

Ket phase_basis_ket(const gf2::BitVector& x, const std::string& name) {
  const int d = x.size();
  const int dim = 1 << d;
  Ket k{SystemLayout::single(name, dim), Vector(dim)};
  const double c = std::pow(2.0, -0.5 * d);
  for (int z = 0; z < dim; ++z) {
    const gf2::BitVector zv = gf2::BitVector::from_basis_index(d, z);
    k.amp(z) = (x.dot(zv) ? -c : c);
  }
  return k;
}

Ket tensor(const Ket& a, const Ket& b) {
  Ket out{a.layout.concat(b.layout), Vector(a.amp.size() * b.amp.size())};
  for (int i = 0; i < a.amp.size(); ++i)
    out.amp.segment(i * b.amp.size(), b.amp.size()) = a.amp(i) * b.amp;
  return out;
}

Operator tensor(const Operator& a, const Operator& b) {
  return Operator{a.layout.concat(b.layout), kron(a.mat, b.mat)};
}

State tensor(const State& a, const State& b) {
  return State{a.layout.concat(b.layout), kron(a.mat, b.mat)};
}

Operator pauli_string_z(const gf2::BitVector& z, const std::string& name) {
  const int d = z.size();
  const int dim = 1 << d;
  Operator op{SystemLayout::single(name, dim), Matrix::Zero(dim, dim)};
  for (int a = 0; a < dim; ++a) {
    const gf2::BitVector av = gf2::BitVector::from_basis_index(d, a);
    op.mat(a, a) = z.dot(av) ? -1.0 : 1.0;
  }
  return op;
}

Operator pauli_string_x(const gf2::BitVector& x, const std::string& name) {
  const int d = x.size();
  const int dim = 1 << d;
  Operator op{SystemLayout::single(name, dim), Matrix::Zero(dim, dim)};
  const std::uint32_t xidx = x.basis_index();
  for (std::uint32_t a = 0; a < static_cast<std::uint32_t>(dim); ++a) op.mat(a ^ xidx, a) = 1.0;
  return op;
}

Operator phase_projector(const gf2::BitVector& x, const std::string& name) {
  Ket k = phase_basis_ket(x, name);
  return Operator{k.layout, k.amp * k.amp.adjoint()};
}

Operator cnot(const std::string& control, const std::string& target, int d) {
  const int dim = 1 << d;
  SystemLayout l({{control, dim}, {target, dim}});
  Operator op{l, Matrix::Zero(dim * dim, dim * dim)};
  for (int z = 0; z < dim; ++z)
    for (int w = 0; w < dim; ++w) op.mat(z * dim + (w ^ z), z * dim + w) = 1.0;
  return op;
}

Operator x_basis_copy(const std::string& a, const std::string& c, int d) {
  const int dim = 1 << d;
  SystemLayout l({{a, dim}, {c, dim}});
  Operator op{l, Matrix::Zero(dim * dim, dim * dim)};
  for (int x = 0; x < dim; ++x) {
    const gf2::BitVector xv = gf2::BitVector::from_basis_index(d, x);
    const Operator proj = phase_projector(xv, a);
    const Operator shift = pauli_string_x(xv, c);
    op.mat += kron(proj.mat, shift.mat);
  }
  return op;
}

Operator permutation_unitary_from_gf2(const gf2::BitMatrix& v, const std::string& name) {
  const int n = v.cols();
  if (v.rows() != n) throw std::invalid_argument("permutation_unitary_from_gf2: v not square");
  if (gf2::rank(v) != n) throw std::invalid_argument("permutation_unitary_from_gf2: v singular");
  const int dim = 1 << n;
  Operator op{SystemLayout::single(name, dim), Matrix::Zero(dim, dim)};
  for (int a = 0; a < dim; ++a) {
    const gf2::BitVector av = gf2::BitVector::from_basis_index(n, a);
    op.mat(v.apply(av).basis_index(), a) = 1.0;
  }
  return op;
}

Operator identity_op(const SystemLayout& layout) {
  return Operator{layout, Matrix::Identity(layout.total_dim(), layout.total_dim())};
}

KrausChannel z_measurement_channel(const std::string& name, int dim) {
  KrausChannel ch;
  for (int z = 0; z < dim; ++z) {
    Operator k{SystemLayout::single(name, dim), Matrix::Zero(dim, dim)};
    k.mat(z, z) = 1.0;
    ch.kraus.push_back(std::move(k));
  }
  ch.validate();
  return ch;
}

KrausChannel x_measurement_channel(const std::string& name, int d_qubits) {
  KrausChannel ch;
  const int dim = 1 << d_qubits;
  for (int x = 0; x < dim; ++x)
    ch.kraus.push_back(phase_projector(gf2::BitVector::from_basis_index(d_qubits, x), name));
  ch.validate();
  return ch;
}

Ket apply(const Operator& op, const Ket& psi) {
  if (op.mat.rows() != op.layout.total_dim() || op.mat.cols() != op.layout.total_dim())
    throw std::invalid_argument("apply: operator matrix does not match its layout");
  for (int r = 0; r < op.layout.size(); ++r) {
    const auto& reg = op.layout.reg(r);
    if (psi.layout.dim_of(reg.name) != reg.dim)
      throw std::invalid_argument("apply: register dim mismatch for " + reg.name);
  }
  Partition part(psi.layout, op.layout.names());
  const auto& so = part.sub_offsets();
  const auto& ro = part.rest_offsets();
  const int ds = part.sub_dim();
  Ket out{psi.layout, Vector(psi.amp.size())};
  Vector buf(ds);
  for (int j = 0; j < part.rest_dim(); ++j) {
    for (int i = 0; i < ds; ++i) buf(i) = psi.amp(so[i] + ro[j]);
    Vector res = op.mat * buf;
    for (int i = 0; i < ds; ++i) out.amp(so[i] + ro[j]) = res(i);
  }
  return out;
}

State apply(const Operator& op, const State& rho) {
  Partition part(rho.layout, op.layout.names());
  const auto& so = part.sub_offsets();
  const auto& ro = part.rest_offsets();
  const int ds = part.sub_dim();
  const int dr = part.rest_dim();
  const int D = rho.layout.total_dim();
  // Rows: out = (K x I) rho.
  Matrix tmp(D, D);
  Matrix buf(ds, D);
  for (int j = 0; j < dr; ++j) {
    for (int i = 0; i < ds; ++i) buf.row(i) = rho.mat.row(so[i] + ro[j]);
    Matrix res = op.mat * buf;
    for (int i = 0; i < ds; ++i) tmp.row(so[i] + ro[j]) = res.row(i);
  }
  // Columns: out = tmp (K x I)^dag.
  Matrix out(D, D);
  Matrix bufc(D, ds);
  for (int j = 0; j < dr; ++j) {
    for (int i = 0; i < ds; ++i) bufc.col(i) = tmp.col(so[i] + ro[j]);
    Matrix res = bufc * dagger(op.mat);
    for (int i = 0; i < ds; ++i) out.col(so[i] + ro[j]) = res.col(i);
  }
  return State{rho.layout, std::move(out)};
}

State apply(const KrausChannel& ch, const State& rho) {
  State acc{rho.layout, Matrix::Zero(rho.mat.rows(), rho.mat.cols())};
  for (const auto& k : ch.kraus) acc.mat += apply(k, rho).mat;
  acc.mat = psd_clamp(acc.mat, 1e-9);
  return acc;
}

Ket extract(const Ket& psi, const std::string& reg, int index) {
  Partition part(psi.layout, {reg});
  const auto& so = part.sub_offsets();
  const auto& ro = part.rest_offsets();
  Ket out{psi.layout.drop({reg}), Vector(part.rest_dim())};
  for (int j = 0; j < part.rest_dim(); ++j) out.amp(j) = psi.amp(so[index] + ro[j]);
  return out;
}

Complex inner(const Ket& a, const Ket& b) {
  if (!(a.layout == b.layout)) throw std::invalid_argument("inner: layout mismatch");
  return a.amp.dot(b.amp);  // Eigen's dot conjugates the left argument
}

State partial_trace(const State& rho, const std::vector<std::string>& keep) {
  const SystemLayout out_layout = rho.layout.keep(keep);
  Partition part(rho.layout, out_layout.names());
  const auto& so = part.sub_offsets();
  const auto& ro = part.rest_offsets();
  const int dk = part.sub_dim();
  Matrix out = Matrix::Zero(dk, dk);
  for (int j = 0; j < part.rest_dim(); ++j)
    for (int i = 0; i < dk; ++i)
      for (int i2 = 0; i2 < dk; ++i2) out(i, i2) += rho.mat(so[i] + ro[j], so[i2] + ro[j]);
  return State{out_layout, std::move(out)};
}

State reduce_ket(const Ket& psi, const std::vector<std::string>& keep) {
  const SystemLayout out_layout = psi.layout.keep(keep);
  Partition part(psi.layout, out_layout.names());
  const auto& so = part.sub_offsets();
  const auto& ro = part.rest_offsets();
  const int dk = part.sub_dim();
  const int dr = part.rest_dim();
  Matrix m(dk, dr);
  for (int i = 0; i < dk; ++i)
    for (int j = 0; j < dr; ++j) m(i, j) = psi.amp(so[i] + ro[j]);
  return State{out_layout, m * m.adjoint()};
}

State dephase_z(const State& rho, const std::string& reg) {
  Partition part(rho.layout, {reg});
  const auto& so = part.sub_offsets();
  const auto& ro = part.rest_offsets();
  State out{rho.layout, Matrix::Zero(rho.mat.rows(), rho.mat.cols())};
  for (int z = 0; z < part.sub_dim(); ++z)
    for (int j = 0; j < part.rest_dim(); ++j)
      for (int j2 = 0; j2 < part.rest_dim(); ++j2)
        out.mat(so[z] + ro[j], so[z] + ro[j2]) = rho.mat(so[z] + ro[j], so[z] + ro[j2]);
  return out;
}

Operator embed(const Operator& op, const SystemLayout& layout) {
  Partition part(layout, op.layout.names());
  const auto& so = part.sub_offsets();
  const auto& ro = part.rest_offsets();
  const int D = layout.total_dim();
  Operator out{layout, Matrix::Zero(D, D)};
  for (int j = 0; j < part.rest_dim(); ++j)
    for (int i = 0; i < part.sub_dim(); ++i)
      for (int i2 = 0; i2 < part.sub_dim(); ++i2)
        out.mat(so[i] + ro[j], so[i2] + ro[j]) = op.mat(i, i2);
  return out;
}

Ket cq_purification(const CqState& cq, const std::string& a_name, const std::string& a1_name,
                    const std::string& a2_name) {
  const int da = cq.a_dim();
  const int de = cq.e_dim();
  SystemLayout layout = SystemLayout::single(a_name, da)
                            .concat(cq.e_layout)
                            .concat(SystemLayout({{a1_name, de}, {a2_name, da}}));
  Ket out = zero_ket(layout);
  // Directly index (a, e, a1, a2) via strides: layout order is A, E..., A1, A2.
  const int stride_a = de * de * da;
  const int stride_e = de * da;
  const int stride_a1 = da;
  for (const auto& [a, block] : cq.blocks) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(block));
    for (int i = 0; i < de; ++i) {
      double lam = es.eigenvalues()(i);
      if (lam < -1e-10) throw std::runtime_error("cq_purification: block not PSD");
      if (lam <= 0) continue;
      const double w = std::sqrt(lam);
      for (int e = 0; e < de; ++e)
        out.amp(static_cast<int>(a) * stride_a + e * stride_e + i * stride_a1 +
                static_cast<int>(a)) += w * es.eigenvectors()(e, i);
    }
  }
  return out;
}

SemiPurificationCheck is_semi_purification(const Ket& phi, const CqState& cq,
                                           const std::string& a_name, double tol) {
  std::vector<std::string> keep{a_name};
  for (const auto& n : cq.e_layout.names()) keep.push_back(n);
  State red = reduce_ket(phi, phi.layout.keep(keep).names());
  red = dephase_z(red, a_name);
  const State target = cq.to_state(a_name);
  if (!(red.layout == target.layout))
    throw std::invalid_argument("is_semi_purification: layout mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(red.mat - target.mat), Eigen::EigenvaluesOnly);
  const double residual = es.eigenvalues().cwiseAbs().sum();
  return SemiPurificationCheck{residual <= tol, residual};
}

Ket twirl(const Ket& phi, const std::string& a_name, const std::string& anc_name) {
  const int da = phi.layout.dim_of(a_name);
  const int d = qubit_count(da);
  Ket extended = tensor(phi, basis_ket(SystemLayout::single(anc_name, da), 0));
  return apply(cnot(a_name, anc_name, d), extended);
}

UhlmannResult uhlmann_unitary(const Ket& psi, const Ket& phi,
                              const std::vector<std::string>& anc) {
  if (!(psi.layout == phi.layout)) throw std::invalid_argument("uhlmann_unitary: layout mismatch");
  const SystemLayout anc_layout = psi.layout.keep(anc);
  if (anc_layout.size() == psi.layout.size())
    throw std::invalid_argument("uhlmann_unitary: ancilla must be a proper subset");
  Partition part(psi.layout, anc_layout.names());
  const auto& so = part.sub_offsets();
  const auto& ro = part.rest_offsets();
  const int dk = part.rest_dim();
  const int dA = part.sub_dim();
  Matrix Psi(dk, dA), Phi(dk, dA);
  for (int i = 0; i < dk; ++i)
    for (int j = 0; j < dA; ++j) {
      Psi(i, j) = psi.amp(so[j] + ro[i]);
      Phi(i, j) = phi.amp(so[j] + ro[i]);
    }
  // <phi|(I x U)|psi> = Tr[C^T U] with C = Phi^dag Psi; the maximizer over
  // unitaries comes from the SVD of C^T and attains the nuclear norm.
  const Matrix Ct = (Phi.adjoint() * Psi).transpose();
  Eigen::JacobiSVD<Matrix> svd(Ct, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Operator u{anc_layout, svd.matrixV() * svd.matrixU().adjoint()};
  UhlmannResult res;
  res.overlap = svd.singularValues().sum();
  res.unitary = std::move(u);
  return res;
}

}  // namespace papec::hilbert
