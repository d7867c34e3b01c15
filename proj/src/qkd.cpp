#include "papec/qkd.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace papec::qkd {

using gf2::BitVector;
using hilbert::Complex;
using hilbert::SystemLayout;

namespace {

std::uint64_t pair_key(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

std::uint32_t hash_of(const gf2::BitMatrix& g, int n, std::uint32_t a) {
  return g.apply(BitVector::from_basis_index(n, a)).basis_index();
}

// b_cor after the verification re-loop: the failing branch is re-corrected.
std::uint32_t resolved_bcor(const QkdInstance& inst, const gf2::BitMatrix& u, std::uint32_t a,
                            std::uint32_t b) {
  const std::uint32_t bcor = inst.ec_table[a][b];
  const std::uint32_t ua = hash_of(u, inst.n, a);
  const std::uint32_t ub = hash_of(u, inst.n, bcor);
  return ua == ub ? bcor : a;
}

}  // namespace

void QkdInstance::validate() const {
  if (n < 1 || n > 3) throw std::invalid_argument("QkdInstance: n out of range");
  if (m < 1 || m > n || l < 1 || l > n) throw std::invalid_argument("QkdInstance: m or l out of range");
  if (verify_family.n != n || verify_family.m != l)
    throw std::invalid_argument("QkdInstance: verify family shape");
  if (pa_family.n != n || pa_family.m != m)
    throw std::invalid_argument("QkdInstance: hash family shape");
  const int da = 1 << n;
  if (static_cast<int>(ec_table.size()) != da)
    throw std::invalid_argument("QkdInstance: reconciliation table shape");
  for (const auto& row : ec_table)
    if (static_cast<int>(row.size()) != da)
      throw std::invalid_argument("QkdInstance: reconciliation table shape");
  if (initial.rows() != init_layout.total_dim())
    throw std::invalid_argument("QkdInstance: initial state dimension");
  if (std::abs(initial.trace().real() - 1.0) > 1e-9)
    throw std::invalid_argument("QkdInstance: initial state must be normalized");
}

ActualTrace run_actual_qkd(const QkdInstance& inst) {
  inst.validate();
  const int da = 1 << inst.n;
  const int de = inst.d_e;
  const auto& layout = inst.init_layout;

  const std::vector<int> off_a = hilbert::Partition(layout, {"Ak"}).sub_offsets();
  const std::vector<int> off_b = hilbert::Partition(layout, {"Bk"}).sub_offsets();
  const std::vector<int> off_e = hilbert::Partition(layout, {"E"}).sub_offsets();
  const bool has_test = layout.has("At");
  std::vector<int> off_at{0}, off_bt{0};
  if (has_test) {
    off_at = hilbert::Partition(layout, {"At"}).sub_offsets();
    off_bt = hilbert::Partition(layout, {"Bt"}).sub_offsets();
  }

  ActualTrace tr;
  tr.sif_ae.n = inst.n;
  tr.sif_ae.e_layout = SystemLayout::single("E", de);

  // Sample measurement and sifting are both bit-basis readouts, so the
  // sifted blocks come straight off the diagonal of the initial state.
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < da; ++b) {
      Matrix w = Matrix::Zero(de, de);
      const int n_t = has_test ? 2 : 1;
      for (int ta = 0; ta < n_t; ++ta)
        for (int tb = 0; tb < n_t; ++tb) {
          if (has_test && ta != tb) continue;  // parity test rejects
          const int base = off_a[a] + off_b[b] + off_at[ta] + off_bt[tb];
          for (int e = 0; e < de; ++e)
            for (int e2 = 0; e2 < de; ++e2) w(e, e2) += inst.initial(base + off_e[e], base + off_e[e2]);
        }
      w = hilbert::hermitize(w);
      tr.sif_blocks.emplace(pair_key(a, b), w);
      tr.sifted_mass += w.trace().real();
      auto it = tr.sif_ae.blocks.find(a);
      if (it == tr.sif_ae.blocks.end())
        tr.sif_ae.blocks.emplace(a, w);
      else
        it->second += w;
    }
  tr.abort_mass = inst.initial.trace().real() - tr.sifted_mass;
  tr.rho_e_fin = tr.sif_ae.Eve_average();

  // Alice's side per hash choice.
  for (const auto& g : inst.pa_family.members) {
    CqState fin;
    fin.n = inst.m;
    fin.e_layout = tr.sif_ae.e_layout;
    for (std::uint32_t k = 0; k < (1u << inst.m); ++k) fin.blocks.emplace(k, Matrix::Zero(de, de));
    for (const auto& [a, blk] : tr.sif_ae.blocks) fin.blocks[hash_of(g, inst.n, a)] += blk;
    tr.fin_ke.push_back(std::move(fin));
  }

  // Joint finals per (u, g) with the re-loop resolved.
  for (size_t ui = 0; ui < inst.verify_family.members.size(); ++ui) {
    const auto& u = inst.verify_family.members[ui];
    const double pu = inst.verify_family.probs[ui].to_double();
    double fail_mass = 0.0;
    for (const auto& [key, w] : tr.sif_blocks) {
      const std::uint32_t a = static_cast<std::uint32_t>(key >> 32);
      const std::uint32_t b = static_cast<std::uint32_t>(key & 0xffffffffu);
      const std::uint32_t bcor = inst.ec_table[a][b];
      if (hash_of(u, inst.n, a) != hash_of(u, inst.n, bcor)) fail_mass += w.trace().real();
    }
    tr.u_fail_mass.push_back(fail_mass);
    for (size_t gi = 0; gi < inst.pa_family.members.size(); ++gi) {
      const auto& g = inst.pa_family.members[gi];
      ActualTrace::JointFinal jf;
      jf.pu = pu;
      jf.pg = inst.pa_family.probs[gi].to_double();
      for (const auto& [key, w] : tr.sif_blocks) {
        const std::uint32_t a = static_cast<std::uint32_t>(key >> 32);
        const std::uint32_t b = static_cast<std::uint32_t>(key & 0xffffffffu);
        const std::uint32_t bcor = resolved_bcor(inst, u, a, b);
        const std::uint64_t kk = pair_key(hash_of(g, inst.n, a), hash_of(g, inst.n, bcor));
        auto it = jf.blocks.find(kk);
        if (it == jf.blocks.end())
          jf.blocks.emplace(kk, w);
        else
          it->second += w;
      }
      tr.joint.push_back(std::move(jf));
    }
  }
  return tr;
}

namespace {

// Accept projector on the test qubits (diagonal), as an operator.
hilbert::Operator parity_accept_projector() {
  SystemLayout l({{"At", 2}, {"Bt", 2}});
  Matrix p = Matrix::Zero(4, 4);
  p(0, 0) = 1.0;
  p(3, 3) = 1.0;
  return hilbert::Operator{l, p};
}

// CqState over k obtained by reading a out of a pure state's key register
// and hashing it; an independent route to the actual scheme's output.
CqState fin_from_ket(const Ket& psi, const gf2::BitMatrix& g, int n, int m, int de) {
  CqState fin;
  fin.n = m;
  fin.e_layout = SystemLayout::single("E", de);
  for (std::uint32_t k = 0; k < (1u << m); ++k) fin.blocks.emplace(k, Matrix::Zero(de, de));
  for (int a = 0; a < (1 << n); ++a) {
    const Ket u = hilbert::extract(psi, "Ak", a);
    fin.blocks[hash_of(g, n, static_cast<std::uint32_t>(a))] +=
        hilbert::reduce_ket(u, {"E"}).mat;
  }
  return fin;
}

}  // namespace

Vq1Trace run_virtual_qkd1(const QkdInstance& inst) {
  inst.validate();
  // Dense-state path: Bob's sift dropped, his registers stay quantum.
  State rho{inst.init_layout, inst.initial};
  if (inst.parity_test) {
    rho = hilbert::apply(parity_accept_projector(), rho);
    rho = hilbert::dephase_z(rho, "At");
    rho = hilbert::dephase_z(rho, "Bt");
  }
  rho = hilbert::dephase_z(rho, "Ak");  // Alice's sifted-key measurement
  Vq1Trace tr;
  tr.sif_ae = hilbert::partial_trace(rho, {"Ak", "E"});
  const int de = inst.d_e;
  for (const auto& g : inst.pa_family.members) {
    CqState fin;
    fin.n = inst.m;
    fin.e_layout = SystemLayout::single("E", de);
    for (std::uint32_t k = 0; k < (1u << inst.m); ++k) fin.blocks.emplace(k, Matrix::Zero(de, de));
    for (int a = 0; a < (1 << inst.n); ++a) {
      Matrix blk(de, de);
      for (int e = 0; e < de; ++e)
        for (int e2 = 0; e2 < de; ++e2) blk(e, e2) = tr.sif_ae.mat(a * de + e, a * de + e2);
      fin.blocks[hash_of(g, inst.n, static_cast<std::uint32_t>(a))] += blk;
    }
    tr.fin_ke.push_back(std::move(fin));
  }
  return tr;
}

namespace {

Ket purify_initial(const QkdInstance& inst) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hilbert::hermitize(inst.initial));
  std::vector<int> kept;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 1e-13) kept.push_back(i);
  const int r = static_cast<int>(kept.size());
  SystemLayout layout = inst.init_layout.concat(SystemLayout::single("App", r));
  Ket psi = hilbert::zero_ket(layout);
  for (int j = 0; j < r; ++j) {
    const double w = std::sqrt(es.eigenvalues()(kept[j]));
    for (int i = 0; i < inst.initial.rows(); ++i) psi.amp(i * r + j) = w * es.eigenvectors()(i, kept[j]);
  }
  return psi;
}

// The sifted-key measurement is a plain bit-basis readout of the carrier,
// so its unitary rewriting is the identity: the carrier register itself is
// the key register, with the measurement deferred. This keeps the phase
// distribution of the pre-hashing state tight.
Ket build_psi_pre(const QkdInstance& inst, Ket* psi_ini_out, double* smp_norm2_out) {
  Ket psi_ini = purify_initial(inst);
  Ket psi_pre = psi_ini;
  if (inst.parity_test) psi_pre = hilbert::apply(parity_accept_projector(), psi_pre);
  if (smp_norm2_out) *smp_norm2_out = psi_pre.norm2();
  if (psi_ini_out) *psi_ini_out = std::move(psi_ini);
  return psi_pre;
}

}  // namespace

Vq2Trace run_virtual_qkd2(const QkdInstance& inst) {
  inst.validate();
  Vq2Trace tr;
  tr.psi_pre = build_psi_pre(inst, &tr.psi_ini, &tr.smp_norm2);
  State red = hilbert::reduce_ket(tr.psi_pre, {"Ak", "E"});
  tr.sif_ae = hilbert::dephase_z(red, "Ak");
  for (const auto& g : inst.pa_family.members)
    tr.fin_ke.push_back(fin_from_ket(tr.psi_pre, g, inst.n, inst.m, inst.d_e));
  return tr;
}

Vq3Trace run_virtual_qkd3(const QkdInstance& inst, pa::AncillaStrategy strategy) {
  inst.validate();
  Vq3Trace tr;
  tr.psi_pre = build_psi_pre(inst, nullptr, nullptr);
  tr.psi_tw = hilbert::twirl(tr.psi_pre, "Ak", "T");
  for (const auto& g : inst.pa_family.members) {
    const pa::PhaseCode code = pa::build_phase_code(g);
    const pa::PecChannel ch =
        pa::build_pec_channel(tr.psi_tw, "Ak", "T", {"E"}, code, strategy);
    tr.per_g.push_back(pa::virtual_pa(tr.psi_tw, ch));
    tr.p_ph.push_back(tr.per_g.back().p_ph);
  }
  return tr;
}

std::vector<double> phase_distribution(const Ket& psi_pre, const std::string& a_reg) {
  const State rho_a = hilbert::reduce_ket(psi_pre, {a_reg});
  const int da = rho_a.layout.total_dim();
  int n = 0;
  while ((1 << n) < da) ++n;
  std::vector<double> p(da);
  for (int x = 0; x < da; ++x) {
    const Ket xt = hilbert::phase_basis_ket(BitVector::from_basis_index(n, x), a_reg);
    p[x] = std::max(0.0, (xt.amp.adjoint() * rho_a.mat * xt.amp)(0, 0).real());
  }
  return p;
}

std::vector<report::Inequality> verify_ladder(const QkdInstance& inst, const ActualTrace& actual,
                                              const Vq1Trace& v1, const Vq2Trace& v2,
                                              const Vq3Trace& v3, double tol) {
  std::vector<report::Inequality> rows;
  const State sif_aq = actual.sif_ae.to_state("Ak");

  // Scheme 1: dropping Bob never changes Alice-plus-environment reductions.
  rows.push_back(report::make_check("lemma7_sif", metrics::l1_distance(v1.sif_ae.mat, sif_aq.mat),
                                    0.0, tol));
  double worst = 0.0;
  for (size_t gi = 0; gi < inst.pa_family.members.size(); ++gi)
    worst = std::max(worst, metrics::l1_distance(v1.fin_ke[gi].to_state("K"),
                                                 actual.fin_ke[gi].to_state("K")));
  rows.push_back(report::make_check("lemma7_fin", worst, 0.0, tol));

  // Scheme 2: purified run with deferred measurements.
  rows.push_back(report::make_check("lemma8_accept_prob",
                                    std::abs(v2.smp_norm2 - actual.sifted_mass), 0.0, tol));
  rows.push_back(
      report::make_check("lemma8_sif", metrics::l1_distance(v2.sif_ae.mat, sif_aq.mat), 0.0, tol));
  const auto semi = hilbert::is_semi_purification(v2.psi_pre, actual.sif_ae, "Ak", tol);
  rows.push_back(report::make_check("lemma8_semi_purification", semi.residual, 0.0, tol));
  worst = 0.0;
  for (size_t gi = 0; gi < inst.pa_family.members.size(); ++gi)
    worst = std::max(worst, metrics::l1_distance(v2.fin_ke[gi].to_state("K"),
                                                 actual.fin_ke[gi].to_state("K")));
  rows.push_back(report::make_check("lemma8_fin", worst, 0.0, tol));

  // Scheme 3: twirl plus per-hash recovery, read out in the bit basis.
  const State tw_red = hilbert::reduce_ket(v3.psi_tw, {"Ak", "E"});
  rows.push_back(report::make_check("lemma9_purification",
                                    metrics::l1_distance(tw_red.mat, sif_aq.mat), 0.0, tol));
  worst = 0.0;
  for (size_t gi = 0; gi < inst.pa_family.members.size(); ++gi)
    worst = std::max(worst, metrics::l1_distance(v3.per_g[gi].fin_ke.to_state("K"),
                                                 actual.fin_ke[gi].to_state("K")));
  rows.push_back(report::make_check("lemma9_fin", worst, 0.0, tol));

  // Mass bookkeeping across abort/accept branches.
  rows.push_back(report::make_check(
      "mass_bookkeeping", std::abs(actual.abort_mass + actual.sifted_mass - 1.0), 0.0, tol));
  return rows;
}

SeparationReport verify_security_separation(const QkdInstance& inst, const ActualTrace& actual,
                                            double tol) {
  SeparationReport rep;
  const int de = inst.d_e;
  const int dk = 1 << inst.m;

  // d1 over the hash ensemble (tag-independent).
  std::vector<metrics::KeyEnsembleMember> d1_members;
  for (size_t gi = 0; gi < inst.pa_family.members.size(); ++gi)
    d1_members.push_back({inst.pa_family.probs[gi].to_double(), actual.fin_ke[gi].to_state("K")});
  rep.d1 = metrics::d1_key(d1_members, actual.rho_e_fin, inst.m);

  // D1 and Pr(K != K') over the joint (tag, hash) ensemble.
  const SystemLayout kk_layout({{"K", dk}, {"Kp", dk}, {"E", de}});
  std::vector<metrics::KeyEnsembleMember> joint_members;
  double int_identity_worst = 0.0;
  for (const auto& jf : actual.joint) {
    State st{kk_layout, Matrix::Zero(dk * dk * de, dk * dk * de)};
    for (const auto& [kk, blk] : jf.blocks) {
      const int k = static_cast<int>(kk >> 32);
      const int kp = static_cast<int>(kk & 0xffffffffu);
      st.mat.block((k * dk + kp) * de, (k * dk + kp) * de, de, de) = blk;
      if (k != kp) rep.pr_key_mismatch += jf.pu * jf.pg * blk.trace().real();
    }
    // Intermediate state of the splitting proof: K' forced equal to K.
    State intermediate{kk_layout, Matrix::Zero(dk * dk * de, dk * dk * de)};
    double mism = 0.0;
    for (const auto& [kk, blk] : jf.blocks) {
      const int k = static_cast<int>(kk >> 32);
      const int kp = static_cast<int>(kk & 0xffffffffu);
      intermediate.mat.block((k * dk + k) * de, (k * dk + k) * de, de, de) += blk;
      if (k != kp) mism += blk.trace().real();
    }
    int_identity_worst = std::max(
        int_identity_worst, std::abs(metrics::l1_distance(st, intermediate) - 2.0 * mism));
    joint_members.push_back({jf.pu * jf.pg, std::move(st)});
  }
  rep.D1 = metrics::D1_security(joint_members, actual.rho_e_fin, inst.m);

  rep.rows.push_back(
      report::make_check("lemma5_separation", rep.D1, rep.d1 + 2.0 * rep.pr_key_mismatch, tol));
  rep.rows.push_back(report::make_check("lemma6_collision", rep.pr_key_mismatch,
                                        std::exp2(-inst.l) * actual.sifted_mass, tol));
  rep.rows.push_back(
      report::make_check("cor3_security", rep.D1, rep.d1 + std::exp2(1 - inst.l), tol));
  rep.rows.push_back(report::make_check("int_state_identity", int_identity_worst, 0.0, tol));
  return rep;
}

Lemma10Report verify_lemma10(const QkdInstance& inst, const ActualTrace& actual,
                             const Vq3Trace& v3, double tol, const entropy::HminOptions& hopts) {
  Lemma10Report rep;
  rep.renyi_half_x = entropy::renyi_half(phase_distribution(v3.psi_pre, "Ak"));
  const State sif = actual.sif_ae.to_state("Ak");
  rep.hmin = entropy::hmin_interval(sif.mat, 1 << inst.n, inst.d_e, hopts);
  entropy::validate_interval(rep.hmin, sif.mat, 1 << inst.n, inst.d_e);
  // Claimed: H_min >= n - H_1/2. Passes on the certified lower end; a
  // certified violation needs even the upper end to fall short.
  rep.rows.push_back(report::make_bracketed_check("lemma10_duality", inst.n - rep.renyi_half_x,
                                                  rep.hmin.lower, rep.hmin.upper, tol));
  return rep;
}

PipelineReport end_to_end_bounds(const QkdInstance& inst, const ActualTrace& actual, double eps3,
                                 const std::vector<Matrix>& candidates, double tol,
                                 const entropy::HminOptions& hopts) {
  PipelineReport rep;
  const SeparationReport sep = verify_security_separation(inst, actual, tol);
  rep.D1 = sep.D1;
  const State sif = actual.sif_ae.to_state("Ak");
  const entropy::SmoothLowerBound smooth =
      entropy::smooth_hmin_lower(sif.mat, 1 << inst.n, inst.d_e, candidates, eps3, hopts);
  const double base = std::exp2(1 - inst.l) + 2.0 * eps3;
  const double t_direct = std::exp2(0.5 * (inst.m - smooth.lower));
  const double t_pec = std::exp2(0.5 * (inst.m - smooth.lower + 3.0));
  rep.bound_direct = base + t_direct;
  rep.bound_via_pec = base + t_pec;
  rep.rows.push_back(report::make_check("pipeline_direct", rep.D1, rep.bound_direct, tol));
  rep.rows.push_back(report::make_check("pipeline_via_pec", rep.D1, rep.bound_via_pec, tol));
  rep.rows.push_back(report::make_check("pipeline_factor",
                                        std::abs(t_pec - 2.0 * std::sqrt(2.0) * t_direct), 0.0,
                                        1e-12 * std::max(1.0, t_pec)));
  return rep;
}

metrics::SecurityReport security_summary(const QkdInstance& inst, const ActualTrace& actual,
                                         const Vq3Trace& v3) {
  metrics::SecurityReport rep;
  const SeparationReport sep = verify_security_separation(inst, actual, 1e-9);
  rep.d1 = sep.d1;
  rep.D1 = sep.D1;
  rep.has_D1 = true;

  // Correctness via the generic metric on the ensemble-averaged joint state;
  // an independent route to the block bookkeeping above.
  const int dk = 1 << inst.m;
  const SystemLayout kk_layout({{"K", dk}, {"Kp", dk}, {"E", inst.d_e}});
  State avg{kk_layout, Matrix::Zero(dk * dk * inst.d_e, dk * dk * inst.d_e)};
  for (const auto& jf : actual.joint)
    for (const auto& [kk, blk] : jf.blocks) {
      const int k = static_cast<int>(kk >> 32);
      const int kp = static_cast<int>(kk & 0xffffffffu);
      avg.mat.block((k * dk + kp) * inst.d_e, (k * dk + kp) * inst.d_e, inst.d_e, inst.d_e) +=
          jf.pu * jf.pg * blk;
    }
  rep.correctness_failure = metrics::correctness_failure(avg, "K", "Kp");

  for (size_t gi = 0; gi < inst.pa_family.members.size(); ++gi) {
    rep.phase_error += inst.pa_family.probs[gi].to_double() * v3.p_ph[gi];
    rep.per_g[inst.pa_family.members[gi].str()] = v3.p_ph[gi];
  }
  return rep;
}

QkdInstance random_qkd_instance(const QkdParams& params, std::mt19937_64& rng) {
  QkdInstance inst;
  inst.n = params.n;
  inst.m = params.m;
  inst.l = params.l;
  inst.d_e = params.d_e;
  inst.parity_test = params.parity_test;
  inst.verify_family = gf2::toeplitz_family(params.n, params.l);
  inst.pa_family = gf2::toeplitz_family(params.n, params.m);

  const int da = 1 << params.n;
  std::vector<hilbert::Register> regs{{"Ak", da}};
  if (params.parity_test) regs.push_back({"At", 2});
  regs.push_back({"E", params.d_e});
  regs.push_back({"Bk", da});
  if (params.parity_test) regs.push_back({"Bt", 2});
  inst.init_layout = SystemLayout(regs);

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> shift_dist(1, da - 1);
  auto random_unit = [&](int d) {
    hilbert::Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v.normalize();
    return v;
  };
  auto random_probs = [&](int d) {
    std::vector<double> p(d);
    double s = 0.0;
    for (auto& x : p) {
      x = 0.05 + std::abs(gauss(rng));
      s += x;
    }
    for (auto& x : p) x /= s;
    return p;
  };

  auto branch_ket = [&]() {
    const int D = inst.init_layout.total_dim();
    const std::vector<int> off_a = hilbert::Partition(inst.init_layout, {"Ak"}).sub_offsets();
    const std::vector<int> off_b = hilbert::Partition(inst.init_layout, {"Bk"}).sub_offsets();
    const std::vector<int> off_e = hilbert::Partition(inst.init_layout, {"E"}).sub_offsets();
    std::vector<int> off_at{0}, off_bt{0};
    if (params.parity_test) {
      off_at = hilbert::Partition(inst.init_layout, {"At"}).sub_offsets();
      off_bt = hilbert::Partition(inst.init_layout, {"Bt"}).sub_offsets();
    }
    hilbert::Vector psi = hilbert::Vector::Zero(D);
    const std::vector<double> p0 = random_probs(da);
    const std::vector<double> p1 = random_probs(da);
    const hilbert::Vector e0 = random_unit(params.d_e);
    const hilbert::Vector e1 = random_unit(params.d_e);
    const double s = params.noise;
    const double r = params.test_catch;
    if (params.kind == InstanceKind::kPhaseConcentrated) {
      // sum_x c_x |x~>_Ak |e_x>_E |0>_Bk with c concentrated at x = 0.
      for (int x = 0; x < da; ++x) {
        const double cx = (x == 0) ? std::sqrt(1.0 - s) : std::sqrt(s * p1[x]);
        const hilbert::Vector& ex = (x == 0) ? e0 : random_unit(params.d_e);
        const gf2::BitVector xv = BitVector::from_basis_index(params.n, x);
        const hilbert::Ket xt = hilbert::phase_basis_ket(xv, "x");
        for (int z = 0; z < da; ++z)
          for (int e = 0; e < params.d_e; ++e)
            psi(off_a[z] + off_b[0] + off_e[e]) += cx * xt.amp(z) * ex(e);
      }
      psi.normalize();
      return psi;
    }
    const int shift = shift_dist(rng);
    // Correlated branch on the accepted test outcome, shifted branch split
    // between the accepted and the flagged test outcome.
    for (int z = 0; z < da; ++z) {
      const double w0 = std::sqrt((1.0 - s) * p0[z]);
      const double w1a = std::sqrt(s * (1.0 - r) * p1[z]);
      const double w1f = std::sqrt(s * r * p1[z]);
      for (int e = 0; e < params.d_e; ++e) {
        psi(off_a[z] + off_b[z] + off_e[e]) += w0 * e0(e);
        psi(off_a[z] + off_b[z ^ shift] + off_e[e]) += w1a * e1(e);
        if (params.parity_test)
          psi(off_a[z] + off_b[z ^ shift] + off_e[e] + off_bt[1]) += w1f * e1(e);
      }
    }
    psi.normalize();
    return psi;
  };

  if (params.rank <= 1) {
    const hilbert::Vector v = branch_ket();
    inst.initial = v * v.adjoint();
  } else {
    std::uniform_real_distribution<double> unif(0.3, 0.7);
    const double w = unif(rng);
    const hilbert::Vector v1 = branch_ket();
    const hilbert::Vector v2 = branch_ket();
    inst.initial = w * (v1 * v1.adjoint()) + (1.0 - w) * (v2 * v2.adjoint());
  }

  inst.ec_table.assign(da, std::vector<std::uint32_t>(da, 0));
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < da; ++b) {
      switch (params.decoder) {
        case EcDecoder::kPerfect:
          inst.ec_table[a][b] = a;
          break;
        case EcDecoder::kNone:
          inst.ec_table[a][b] = b;
          break;
        case EcDecoder::kParity: {
          const int pa_bits = std::popcount(static_cast<unsigned>(a)) & 1;
          const int pb_bits = std::popcount(static_cast<unsigned>(b)) & 1;
          inst.ec_table[a][b] = (pa_bits == pb_bits) ? b : (b ^ 1u);
          break;
        }
      }
    }
  inst.validate();
  return inst;
}

}  // namespace papec::qkd
