#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "papec/entropy.hpp"
#include "papec/gf2.hpp"
#include "papec/hilbert.hpp"
#include "papec/metrics.hpp"
#include "papec/pa.hpp"
#include "papec/report.hpp"

// A desk-scale key-distribution scheme and its three virtual rewritings:
// Bob's operations dropped, the run purified with deferred measurements,
// and the hashing step replaced by phase error correction.

namespace papec::qkd {

using hilbert::CqState;
using hilbert::Ket;
using hilbert::Matrix;
using hilbert::State;

enum class EcDecoder {
  kPerfect,  // reconciliation transmits the whole key (encrypted)
  kParity,   // flips the last bit when the announced parity disagrees
  kNone      // no correction
};

struct QkdInstance {
  int n = 0;    // sifted key bits
  int m = 0;    // final key bits
  int l = 0;    // verification tag bits
  int d_e = 1;  // environment dimension
  bool parity_test = false;
  hilbert::SystemLayout init_layout;  // Ak [At] E Bk [Bt]
  Matrix initial;
  // b_cor indexed [a][b]; the composition of the decoder with the
  // (encrypted) reconciliation message computed from a.
  std::vector<std::vector<std::uint32_t>> ec_table;
  gf2::LinearHashFamily verify_family;  // n -> l
  gf2::LinearHashFamily pa_family;      // n -> m

  void validate() const;
};

// The verification re-loop is modeled as one round whose failure branch is
// completed by a trivially correct second reconciliation round (the failure
// mass is retained with b_cor = a and reported separately). This keeps the
// full sifted mass in every scheme, which is what makes the scheme-ladder
// equalities exact, while the interesting collision event stays the
// accepted-but-wrong branch.
struct ActualTrace {
  double abort_mass = 0.0;
  double sifted_mass = 0.0;
  std::map<std::uint64_t, Matrix> sif_blocks;  // key (a << 32) | b
  CqState sif_ae;                              // over a
  std::vector<double> u_fail_mass;             // re-looped mass per u
  struct JointFinal {
    double pu = 0.0, pg = 0.0;
    std::map<std::uint64_t, Matrix> blocks;  // key (k << 32) | k'
  };
  std::vector<JointFinal> joint;     // u-major, g-minor
  std::vector<CqState> fin_ke;       // per g, Alice's side
  Matrix rho_e_fin;                  // = rho_E of the sifted state
};

ActualTrace run_actual_qkd(const QkdInstance& inst);

struct Vq1Trace {
  State sif_ae;               // on [Ak, E], dense path
  std::vector<CqState> fin_ke;
};
Vq1Trace run_virtual_qkd1(const QkdInstance& inst);

struct Vq2Trace {
  Ket psi_ini;   // purification of the initial state (ancilla App)
  Ket psi_pre;   // after the sample projection and the sift unitary
  double smp_norm2 = 0.0;
  State sif_ae;  // Z-dephased (A,E) reduction of psi_pre
  std::vector<CqState> fin_ke;
};
Vq2Trace run_virtual_qkd2(const QkdInstance& inst);

struct Vq3Trace {
  Ket psi_pre;
  Ket psi_tw;
  std::vector<pa::VirtualPaResult> per_g;
  std::vector<double> p_ph;  // per g
};
Vq3Trace run_virtual_qkd3(const QkdInstance& inst,
                          pa::AncillaStrategy strategy = pa::AncillaStrategy::kOptimal);

// Pr(X = x) = <x~| rho_A |x~> of the pre-hashing pure state; sums to its norm.
std::vector<double> phase_distribution(const Ket& psi_pre, const std::string& a_reg);

// Scheme-ladder equalities: reduced-state identities between the actual
// scheme and the three rewritings, plus the semi-purification and
// purification predicates.
std::vector<report::Inequality> verify_ladder(const QkdInstance& inst, const ActualTrace& actual,
                                              const Vq1Trace& v1, const Vq2Trace& v2,
                                              const Vq3Trace& v3, double tol);

struct SeparationReport {
  std::vector<report::Inequality> rows;
  double d1 = 0.0;
  double D1 = 0.0;
  double pr_key_mismatch = 0.0;
};
// Joint-vs-marginal security splitting, the verification collision bound
// over the tag ensemble, and the intermediate-state identity.
SeparationReport verify_security_separation(const QkdInstance& inst, const ActualTrace& actual,
                                            double tol);

struct Lemma10Report {
  std::vector<report::Inequality> rows;
  double renyi_half_x = 0.0;
  entropy::EntropyInterval hmin;
};
// Certified check of H_min(A|E) of the sifted state against n - H_1/2 of
// the phase distribution (duality route).
Lemma10Report verify_lemma10(const QkdInstance& inst, const ActualTrace& actual,
                             const Vq3Trace& v3, double tol,
                             const entropy::HminOptions& hopts = {});

struct PipelineReport {
  std::vector<report::Inequality> rows;
  double D1 = 0.0;
  double bound_direct = 0.0;   // 2^{-l+1} + 2 eps + 2^{(m-H)/2}
  double bound_via_pec = 0.0;  // same with the exponent shifted by 3
};
// Both proof pipelines evaluated on the same trace; the two hashing terms
// differ exactly by 2^{3/2}.
PipelineReport end_to_end_bounds(const QkdInstance& inst, const ActualTrace& actual, double eps3,
                                 const std::vector<Matrix>& candidates, double tol,
                                 const entropy::HminOptions& hopts = {});

enum class InstanceKind {
  // Correlated bit-basis pair plus a bit-flipped branch; the environment
  // purifies which branch occurred. The phase distribution is broad.
  kBitCorrelated,
  // The key carrier sits mostly in one phase-basis state with environment
  // leakage attached to the rare phase excursions; Bob's key comes from
  // reconciliation alone. Makes the phase-randomness checks tight.
  kPhaseConcentrated
};

// One-stop security summary of a run: the distance functionals, the average
// failure probability of the embedded recovery step, and the per-hash
// breakdown keyed by the hash matrix text form.
metrics::SecurityReport security_summary(const QkdInstance& inst, const ActualTrace& actual,
                                         const Vq3Trace& v3);

struct QkdParams {
  int n = 2;
  int m = 1;
  int l = 1;
  int d_e = 2;
  InstanceKind kind = InstanceKind::kBitCorrelated;
  double noise = 0.2;       // weight of the error branch
  double test_catch = 0.0;  // fraction of the noisy branch flagged by the test
  bool parity_test = false;
  EcDecoder decoder = EcDecoder::kParity;
  int rank = 2;  // 1 or 2
};
QkdInstance random_qkd_instance(const QkdParams& params, std::mt19937_64& rng);

}  // namespace papec::qkd
