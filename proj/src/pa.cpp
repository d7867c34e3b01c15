#include "papec/pa.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace papec::pa {

using hilbert::Complex;
using hilbert::dagger;
using hilbert::SystemLayout;

namespace {

// Offsets of a register group inside a layout; disjoint groups covering the
// layout add up to global indices.
std::vector<int> group_offsets(const SystemLayout& layout, const std::vector<std::string>& names) {
  if (names.empty()) return {0};
  return hilbert::Partition(layout, names).sub_offsets();
}

// I_{2^m} x |s~><s~| on an n-qubit register.
Matrix syndrome_projector(int n, int m, std::uint32_t s) {
  const int da = 1 << n;
  if (n == m) return Matrix::Identity(da, da);
  const gf2::BitVector sv = gf2::BitVector::from_basis_index(n - m, s);
  const hilbert::Ket stilde = hilbert::phase_basis_ket(sv, "s");
  const Matrix proj = stilde.amp * stilde.amp.adjoint();
  return hilbert::kron(Matrix::Identity(1 << m, 1 << m), proj);
}

gf2::BitVector syndrome_z_string(int n, int m, std::uint32_t s) {
  gf2::BitVector z = gf2::BitVector::zero(n);
  for (int j = 0; j < n - m; ++j) z.set_bit(m + j, (s >> (n - m - 1 - j)) & 1u);
  return z;
}

}  // namespace

void PaInstance::validate() const {
  if (initial.n != n) throw std::invalid_argument("PaInstance: key length mismatch");
  if (family.n != n || family.m != m) throw std::invalid_argument("PaInstance: family shape mismatch");
  initial.validate();
  family.validate(true);
}

PhaseCode build_phase_code(const BitMatrix& g) {
  PhaseCode code;
  code.n = g.cols();
  code.m = g.rows();
  code.g = g;
  code.h = gf2::complete_check_matrix(g);
  code.v = gf2::extend_basis(g, code.h);
  // Logical Z and syndrome X strings commute; checked numerically.
  for (int i = 0; i < code.m; ++i)
    for (int j = 0; j < code.n - code.m; ++j) {
      const hilbert::Operator zi = hilbert::pauli_string_z(code.g.row(i), "A");
      const hilbert::Operator xj = hilbert::pauli_string_x(code.h.row(j), "A");
      const Matrix comm = zi.mat * xj.mat - xj.mat * zi.mat;
      if (comm.cwiseAbs().maxCoeff() > 1e-12)
        throw std::runtime_error("build_phase_code: logical/syndrome operators do not commute");
    }
  return code;
}

CqState actual_pa(const PaInstance& inst, const BitMatrix& g) {
  if (g.rows() != inst.m || g.cols() != inst.n)
    throw std::invalid_argument("actual_pa: hash shape mismatch");
  CqState out;
  out.n = inst.m;
  out.e_layout = inst.initial.e_layout;
  const int de = inst.initial.e_dim();
  for (const auto& [a, block] : inst.initial.blocks) {
    const std::uint32_t k = g.apply(gf2::BitVector::from_basis_index(inst.n, a)).basis_index();
    auto it = out.blocks.find(k);
    if (it == out.blocks.end())
      out.blocks.emplace(k, block);
    else
      it->second += block;
  }
  for (std::uint32_t k = 0; k < (1u << inst.m); ++k)
    if (!out.blocks.count(k)) out.blocks.emplace(k, Matrix::Zero(de, de));
  return out;
}

Ket PecChannel::apply_pair(int i, const Ket& psi) const {
  return hilbert::apply(kraus[i].a_part, hilbert::apply(kraus[i].anc_part, psi));
}

hilbert::KrausChannel PecChannel::materialize(const SystemLayout& layout) const {
  std::vector<std::string> group_names{a_reg};
  group_names.insert(group_names.end(), anc_regs.begin(), anc_regs.end());
  const SystemLayout group = layout.keep(group_names);
  hilbert::KrausChannel ch;
  for (const auto& kp : kraus) {
    hilbert::Operator k{group,
                        hilbert::embed(kp.a_part, group).mat * hilbert::embed(kp.anc_part, group).mat};
    ch.kraus.push_back(std::move(k));
  }
  ch.completeness = hilbert::Completeness::kTracePreserving;
  return ch;
}

PecChannel build_pec_channel(const Ket& purification, const std::string& a_reg,
                             const std::string& replica_reg,
                             const std::vector<std::string>& e_regs, const PhaseCode& code,
                             AncillaStrategy strategy) {
  const int n = code.n;
  const int m = code.m;
  const int da = 1 << n;
  const SystemLayout& layout = purification.layout;
  if (layout.dim_of(a_reg) != da || layout.dim_of(replica_reg) != da)
    throw std::invalid_argument("build_pec_channel: register dims do not match the code length");

  std::vector<std::string> excluded = e_regs;
  excluded.push_back(a_reg);
  const std::vector<std::string> anc = layout.names_except(excluded);
  if (std::find(anc.begin(), anc.end(), replica_reg) == anc.end())
    throw std::invalid_argument("build_pec_channel: replica register must be an ancilla");
  const SystemLayout anc_layout = layout.keep(anc);
  const int danc = anc_layout.total_dim();
  const std::vector<std::string> e_names = layout.keep(e_regs).names();
  std::vector<std::string> anc_other;
  for (const auto& nm : anc)
    if (nm != replica_reg) anc_other.push_back(nm);

  // Frame change: V on the bit register and on its replica makes the hash
  // readout plain Z on the leading qubits and the syndrome plain X on the
  // trailing ones.
  const hilbert::Operator va = hilbert::permutation_unitary_from_gf2(code.v, a_reg);
  const hilbert::Operator vr = hilbert::permutation_unitary_from_gf2(code.v, replica_reg);
  const Ket psi_t = hilbert::apply(va, hilbert::apply(vr, purification));

  // Environment reduction and its purification into (E, anc_other).
  const hilbert::State rho_e_state = hilbert::reduce_ket(psi_t, e_names);
  const Matrix rho_e = rho_e_state.mat;
  const int de = static_cast<int>(rho_e.rows());
  int dao = 1;
  for (const auto& nm : anc_other) dao *= layout.dim_of(nm);
  Eigen::SelfAdjointEigenSolver<Matrix> es(hilbert::hermitize(rho_e));
  int rank = 0;
  for (int i = 0; i < de; ++i)
    if (es.eigenvalues()(i) > 1e-14) ++rank;
  if (rank > dao)
    throw std::invalid_argument("build_pec_channel: ancilla too small to purify the environment");

  // Ideal purification 2^{-n/2} sum_a |a>_A |phi>_(E,anc_other) |a>_replica.
  Ket ideal_t = hilbert::zero_ket(layout);
  {
    const std::vector<int> off_a = group_offsets(layout, {a_reg});
    const std::vector<int> off_r = group_offsets(layout, {replica_reg});
    const std::vector<int> off_e = group_offsets(layout, e_names);
    const std::vector<int> off_o = group_offsets(layout, anc_other);
    const double c = std::pow(2.0, -0.5 * n);
    int slot = 0;
    for (int i = 0; i < de; ++i) {
      const double lam = es.eigenvalues()(i);
      if (lam <= 1e-14) continue;
      const double w = std::sqrt(lam);
      for (int a = 0; a < da; ++a)
        for (int e = 0; e < de; ++e)
          ideal_t.amp(off_a[a] + off_r[a] + off_e[e] + off_o[slot]) +=
              c * w * es.eigenvectors()(e, i);
      ++slot;
    }
  }

  // CNOT from the replica's syndrome part onto the A syndrome part.
  hilbert::Operator n_sps{SystemLayout({{replica_reg, da}, {a_reg, da}}),
                          Matrix::Zero(da * da, da * da)};
  {
    const std::uint32_t mask_s = (n == m) ? 0u : ((1u << (n - m)) - 1u);
    for (int r = 0; r < da; ++r)
      for (int a = 0; a < da; ++a)
        n_sps.mat(r * da + (a ^ (r & mask_s)), r * da + a) = 1.0;
  }

  const Ket psi_c = hilbert::apply(n_sps, psi_t);
  const Ket phi_c = hilbert::apply(n_sps, ideal_t);
  const hilbert::UhlmannResult uh = hilbert::uhlmann_unitary(psi_c, phi_c, anc);

  PecChannel ch;
  ch.code = code;
  ch.a_reg = a_reg;
  ch.anc_regs = anc;
  ch.e_regs = e_names;
  ch.uhlmann_overlap = uh.overlap;

  const Matrix va_d = va.mat;
  const Matrix vr_anc = hilbert::embed(vr, anc_layout).mat;
  const Matrix t_anc = uh.unitary.mat;

  const int n_syndromes = 1 << (n - m);
  for (int s = 0; s < n_syndromes; ++s) {
    const Matrix p_s = syndrome_projector(n, m, static_cast<std::uint32_t>(s));
    const gf2::BitVector zs = syndrome_z_string(n, m, static_cast<std::uint32_t>(s));
    if (strategy == AncillaStrategy::kTrivial || strategy == AncillaStrategy::kSyndromeOnly) {
      PecChannel::KrausPair kp;
      Matrix a_mat = p_s;
      if (strategy == AncillaStrategy::kSyndromeOnly)
        a_mat = hilbert::pauli_string_z(zs, a_reg).mat * a_mat;  // coset-leader flip 0||s
      kp.a_part = hilbert::Operator{SystemLayout::single(a_reg, da), va_d.adjoint() * a_mat * va_d};
      kp.anc_part = hilbert::identity_op(anc_layout);
      ch.kraus.push_back(std::move(kp));
      continue;
    }
    const Matrix zs_anc = hilbert::embed(hilbert::pauli_string_z(zs, replica_reg), anc_layout).mat;
    const Matrix m_s = zs_anc * t_anc * zs_anc;  // Z^s_{S'} T Z^s_{S'}
    for (int e = 0; e < da; ++e) {
      const gf2::BitVector ev = gf2::BitVector::from_basis_index(n, e);
      const Matrix a_mat = hilbert::pauli_string_z(ev, a_reg).mat * p_s;
      const Matrix pe_anc =
          hilbert::embed(hilbert::phase_projector(ev, replica_reg), anc_layout).mat;
      PecChannel::KrausPair kp;
      kp.a_part = hilbert::Operator{SystemLayout::single(a_reg, da), va_d.adjoint() * a_mat * va_d};
      kp.anc_part = hilbert::Operator{anc_layout, vr_anc.adjoint() * (pe_anc * m_s) * vr_anc};
      ch.kraus.push_back(std::move(kp));
    }
  }

  if (strategy == AncillaStrategy::kCorrupted) {
    // Fault-injection hook: silently drop all but one Kraus operator, so the
    // downstream inequality checks must catch the broken channel.
    ch.kraus.resize(1);
    return ch;
  }

  // Trace preservation, asserted at construction.
  Matrix acc = Matrix::Zero(da * danc, da * danc);
  for (const auto& kp : ch.kraus)
    acc += hilbert::kron(dagger(kp.a_part.mat) * kp.a_part.mat,
                         dagger(kp.anc_part.mat) * kp.anc_part.mat);
  if ((acc - Matrix::Identity(da * danc, da * danc)).cwiseAbs().maxCoeff() > 1e-9)
    throw std::runtime_error("build_pec_channel: Kraus family is not trace preserving");

  return ch;
}

PecBuild optimal_pec_channel(const PaInstance& inst, const BitMatrix& g, AncillaStrategy strategy) {
  const double total = static_cast<double>(inst.initial.a_dim()) * inst.initial.e_dim();
  if (total * total > static_cast<double>(hilbert::kMaxTotalDim))
    throw std::invalid_argument("optimal_pec_channel: instance exceeds the dimension cap");
  PecBuild out;
  out.psi_ini = hilbert::cq_purification(inst.initial, "A", "A1", "A2");
  out.channel =
      build_pec_channel(out.psi_ini, "A", "A2", inst.initial.e_layout.names(),
                        build_phase_code(g), strategy);
  return out;
}

VirtualPaResult virtual_pa(const Ket& psi, const PecChannel& ch) {
  const int n = ch.code.n;
  const int m = ch.code.m;
  const int da = 1 << n;
  const SystemLayout e_layout = psi.layout.keep(ch.e_regs);
  const int de = e_layout.total_dim();

  VirtualPaResult res;
  res.fin_ke.n = m;
  res.fin_ke.e_layout = e_layout;
  for (std::uint32_t k = 0; k < (1u << m); ++k)
    res.fin_ke.blocks.emplace(k, Matrix::Zero(de, de));
  res.rho_pec_a = hilbert::State{SystemLayout::single(ch.a_reg, da), Matrix::Zero(da, da)};

  const hilbert::Operator p0 =
      hilbert::phase_projector(gf2::BitVector::zero(n), ch.a_reg);
  double good = 0.0;
  for (int i = 0; i < static_cast<int>(ch.kraus.size()); ++i) {
    const Ket phi = ch.apply_pair(i, psi);
    res.trace += phi.norm2();
    good += hilbert::apply(p0, phi).norm2();
    res.rho_pec_a.mat += hilbert::reduce_ket(phi, {ch.a_reg}).mat;
    for (int a = 0; a < da; ++a) {
      const Ket u = hilbert::extract(phi, ch.a_reg, a);
      const std::uint32_t k =
          ch.code.g.apply(gf2::BitVector::from_basis_index(n, static_cast<std::uint32_t>(a)))
              .basis_index();
      res.fin_ke.blocks[k] += hilbert::reduce_ket(u, ch.e_regs).mat;
    }
  }
  res.p_ph = res.trace - good;
  return res;
}

TwirledPaResult virtual_pa_twirled(const Ket& semi_purification, const PaInstance& inst,
                                   const std::string& a_reg, const BitMatrix& g,
                                   AncillaStrategy strategy) {
  const auto check = hilbert::is_semi_purification(semi_purification, inst.initial, a_reg);
  if (!check.ok)
    throw std::invalid_argument("virtual_pa_twirled: input is not a semi-purification (residual " +
                                std::to_string(check.residual) + ")");
  TwirledPaResult out;
  out.psi_tw = hilbert::twirl(semi_purification, a_reg, "Atw");
  out.result = virtual_pa(out.psi_tw,
                          build_pec_channel(out.psi_tw, a_reg, "Atw",
                                            inst.initial.e_layout.names(), build_phase_code(g),
                                            strategy));
  return out;
}

namespace {

struct EnsembleData {
  double avg_p_ph = 0.0;
  double avg_trace = 0.0;
  double avg_one_minus_f2 = 0.0;
  double d1 = 0.0;
  std::vector<double> per_g_p_ph;
  std::vector<double> per_g_fidelity;
};

EnsembleData run_family(const PaInstance& inst, AncillaStrategy strategy) {
  EnsembleData data;
  const Matrix rho_e = inst.initial.Eve_average();
  const hilbert::State ideal =
      metrics::ideal_key_state(rho_e, inst.m, "K", inst.initial.e_layout);
  for (size_t i = 0; i < inst.family.members.size(); ++i) {
    const double p = inst.family.probs[i].to_double();
    const PecBuild build = optimal_pec_channel(inst, inst.family.members[i], strategy);
    const VirtualPaResult vres = virtual_pa(build.psi_ini, build.channel);
    const hilbert::State fin = vres.fin_ke.to_state("K");
    const double f = metrics::fidelity_generalized(ideal, fin);
    data.avg_p_ph += p * vres.p_ph;
    data.avg_trace += p * vres.trace;
    data.avg_one_minus_f2 += p * (1.0 - f * f);
    data.d1 += p * metrics::l1_distance(fin, ideal);
    data.per_g_p_ph.push_back(vres.p_ph);
    data.per_g_fidelity.push_back(f);
  }
  return data;
}

}  // namespace

PaVerifyResult verify_theorem1(const PaInstance& inst, double tol,
                               const entropy::HminOptions& hopts, AncillaStrategy strategy) {
  inst.validate();
  PaVerifyResult out;
  const hilbert::State rho_ae = inst.initial.to_state("A");
  out.hmin = entropy::hmin_interval(rho_ae.mat, inst.initial.a_dim(), inst.initial.e_dim(), hopts);
  entropy::validate_interval(out.hmin, rho_ae.mat, inst.initial.a_dim(), inst.initial.e_dim());

  const EnsembleData data = run_family(inst, strategy);
  out.avg_p_ph = data.avg_p_ph;
  out.per_g_p_ph = data.per_g_p_ph;
  out.per_g_fidelity = data.per_g_fidelity;
  out.d1 = data.d1;

  for (size_t i = 0; i < inst.family.members.size(); ++i) {
    const double f = data.per_g_fidelity[i];
    out.rows.push_back(report::make_check("lemma12:g=" + inst.family.members[i].str(),
                                          data.per_g_p_ph[i], 1.0 - f * f, 1e-9));
  }
  const double sound = std::exp2(inst.m - out.hmin.upper);
  const double optimistic = std::exp2(inst.m - out.hmin.lower);
  out.rows.push_back(report::make_bracketed_check("theorem1", data.avg_p_ph, sound, optimistic, tol));
  out.rows.push_back(
      report::make_bracketed_check("lemma13", data.avg_one_minus_f2, sound, optimistic, tol));
  out.rows.push_back(report::make_check("pec_trace_conserved",
                                        std::abs(data.avg_trace - inst.initial.trace()), 0.0, 1e-9));
  return out;
}

PaVerifyResult verify_lhl_like(const PaInstance& inst, double tol,
                               const entropy::HminOptions& hopts, AncillaStrategy strategy) {
  inst.validate();
  PaVerifyResult out;
  const hilbert::State rho_ae = inst.initial.to_state("A");
  out.hmin = entropy::hmin_interval(rho_ae.mat, inst.initial.a_dim(), inst.initial.e_dim(), hopts);
  entropy::validate_interval(out.hmin, rho_ae.mat, inst.initial.a_dim(), inst.initial.e_dim());

  const EnsembleData data = run_family(inst, strategy);
  out.avg_p_ph = data.avg_p_ph;
  out.per_g_p_ph = data.per_g_p_ph;
  out.per_g_fidelity = data.per_g_fidelity;
  out.d1 = data.d1;

  const double rhs_pec = 2.0 * std::sqrt(2.0) * std::sqrt(std::max(0.0, data.avg_p_ph));
  const double rhs_lhl = std::exp2(0.5 * (inst.m - out.hmin.lower));
  const double rhs_cor1 = std::exp2(0.5 * (inst.m - out.hmin.lower + 3.0));
  out.rows.push_back(report::make_check("d1_vs_pec", data.d1, rhs_pec, 1e-9));
  out.rows.push_back(report::make_check("lhl", data.d1, rhs_lhl, tol));
  out.rows.push_back(report::make_check("lhl_like_cor1", data.d1, rhs_cor1, tol));
  out.rows.push_back(report::make_check("cor1_factor",
                                        std::abs(rhs_cor1 - 2.0 * std::sqrt(2.0) * rhs_lhl), 0.0,
                                        1e-12 * std::max(1.0, rhs_cor1)));
  return out;
}

PaVerifyResult verify_corollary2(const PaInstance& inst, const std::vector<Matrix>& candidates,
                                 double eps, double tol, const entropy::HminOptions& hopts) {
  inst.validate();
  PaVerifyResult out;
  const hilbert::State rho_ae = inst.initial.to_state("A");
  const entropy::SmoothLowerBound smooth = entropy::smooth_hmin_lower(
      rho_ae.mat, inst.initial.a_dim(), inst.initial.e_dim(), candidates, eps, hopts);
  out.hmin = entropy::hmin_interval(rho_ae.mat, inst.initial.a_dim(), inst.initial.e_dim(), hopts);

  const EnsembleData data = run_family(inst, AncillaStrategy::kOptimal);
  out.d1 = data.d1;
  out.avg_p_ph = data.avg_p_ph;

  const double rhs = 2.0 * eps + std::exp2(0.5 * (inst.m - smooth.lower + 3.0));
  out.rows.push_back(report::make_check("cor2", data.d1, rhs, tol));
  return out;
}

namespace {

Matrix ginibre_density(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

}  // namespace

PaInstance random_instance(int n, int m, int d_e, double leak, std::mt19937_64& rng,
                           double total_trace) {
  PaInstance inst;
  inst.n = n;
  inst.m = m;
  inst.family = gf2::toeplitz_family(n, m);
  inst.initial.n = n;
  inst.initial.e_layout = SystemLayout::single("E", d_e);
  const int da = 1 << n;
  const Matrix sigma = ginibre_density(d_e, rng);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(da);
  double wsum = 0.0;
  for (int a = 0; a < da; ++a) {
    w[a] = 1.0 + leak * expo(rng);
    wsum += w[a];
  }
  for (int a = 0; a < da; ++a) {
    const Matrix noise = ginibre_density(d_e, rng);
    inst.initial.blocks.emplace(
        a, (total_trace * w[a] / wsum) * ((1.0 - leak) * sigma + leak * noise));
  }
  inst.validate();
  return inst;
}

PaInstance spiked_instance(int n, int m, double spike_mass) {
  PaInstance inst;
  inst.n = n;
  inst.m = m;
  inst.family = gf2::toeplitz_family(n, m);
  inst.initial.n = n;
  inst.initial.e_layout = SystemLayout::single("E", 2);
  const int da = 1 << n;
  const double w = (1.0 - spike_mass) / da;
  Matrix base = Matrix::Zero(2, 2);
  base(0, 0) = w;
  for (int a = 0; a < da; ++a) inst.initial.blocks.emplace(a, base);
  // One distinguishable low-mass block: seeing |1> identifies a = 0.
  inst.initial.blocks[0](1, 1) += spike_mass;
  inst.validate();
  return inst;
}

}  // namespace papec::pa
