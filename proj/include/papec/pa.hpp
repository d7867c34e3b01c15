#pragma once

#include <random>
#include <string>
#include <vector>

#include "papec/entropy.hpp"
#include "papec/gf2.hpp"
#include "papec/hilbert.hpp"
#include "papec/metrics.hpp"
#include "papec/report.hpp"

// The actual privacy-amplification scheme, the virtual scheme built from the
// phase code of the hash matrix with its optimal recovery channel, and the
// verification suites tying them together.

namespace papec::pa {

using gf2::BitMatrix;
using gf2::BitVector;
using hilbert::CqState;
using hilbert::Ket;
using hilbert::Matrix;
using hilbert::Operator;
using hilbert::State;

struct PaInstance {
  int n = 0;
  int m = 0;
  CqState initial;             // cq state over n-bit strings
  gf2::LinearHashFamily family;

  void validate() const;
};

// The phase code of hash matrix g: check matrix h with h g^T = 0, basis
// completion v, logical Z strings g_i and syndrome X strings h_j.
struct PhaseCode {
  int n = 0;
  int m = 0;
  BitMatrix g, h, v;
};

// Builds h and v and verifies the logical/syndrome commutation numerically.
PhaseCode build_phase_code(const BitMatrix& g);

// rho_KE^{fin,g}: block k collects the initial blocks over g^{-1}(k).
CqState actual_pa(const PaInstance& inst, const BitMatrix& g);

enum class AncillaStrategy {
  kOptimal,       // Uhlmann-rotated ancilla measurement
  kTrivial,       // never flips (e = 0)
  kSyndromeOnly,  // coset-leader flip from the syndrome alone
  kCorrupted      // fault-injection hook: optimal followed by a wrong flip
};

// Recovery channel on A and the ancilla registers (identity on E). Kraus
// operators are kept factored as (A part) x (ancilla part).
struct PecChannel {
  PhaseCode code;
  std::string a_reg;
  std::vector<std::string> anc_regs;  // includes the replica register
  std::vector<std::string> e_regs;
  struct KrausPair {
    Operator a_part;    // on a_reg
    Operator anc_part;  // on the joint ancilla registers
  };
  std::vector<KrausPair> kraus;
  double uhlmann_overlap = 0.0;  // root fidelity achieved by the rotation

  Ket apply_pair(int i, const Ket& psi) const;
  // Dense Kraus list on [a_reg + anc within `layout` order]; small dims only.
  hilbert::KrausChannel materialize(const hilbert::SystemLayout& layout) const;
};

// Core construction. `purification` must be a purification of a cq state
// with respect to a_reg carrying an explicit replica register (a register
// holding a copy of the bit-basis value of a_reg), which twirling and the
// canonical cq purification both provide.
PecChannel build_pec_channel(const Ket& purification, const std::string& a_reg,
                             const std::string& replica_reg,
                             const std::vector<std::string>& e_regs, const PhaseCode& code,
                             AncillaStrategy strategy = AncillaStrategy::kOptimal);

// Canonical purification of the instance plus its recovery channel.
struct PecBuild {
  Ket psi_ini;  // registers A, E..., A1, A2
  PecChannel channel;
};
PecBuild optimal_pec_channel(const PaInstance& inst, const BitMatrix& g,
                             AncillaStrategy strategy = AncillaStrategy::kOptimal);

struct VirtualPaResult {
  double trace = 0.0;   // Tr rho^{pec,g}
  double p_ph = 0.0;    // phase error mass of rho^{pec,g} on A
  CqState fin_ke;       // after the logical-Z readout
  State rho_pec_a;      // reduction of rho^{pec,g} onto A
};
// Applies the channel to the purification and reads the hash value out of
// the logical Z operators.
VirtualPaResult virtual_pa(const Ket& psi, const PecChannel& ch);

// Twirls a semi-purification into a purification (the fresh ancilla becomes
// the replica) and runs virtual PA on it.
struct TwirledPaResult {
  Ket psi_tw;
  VirtualPaResult result;
};
TwirledPaResult virtual_pa_twirled(const Ket& semi_purification, const PaInstance& inst,
                                   const std::string& a_reg, const BitMatrix& g,
                                   AncillaStrategy strategy = AncillaStrategy::kOptimal);

struct PaVerifyResult {
  std::vector<report::Inequality> rows;
  entropy::EntropyInterval hmin;
  double d1 = 0.0;
  double avg_p_ph = 0.0;
  std::vector<double> per_g_p_ph;
  std::vector<double> per_g_fidelity;
};

// Coding-theorem suite: average failure probability against the certified
// min-entropy bracket, the per-g recovery-fidelity bound, and its average.
PaVerifyResult verify_theorem1(const PaInstance& inst, double tol,
                               const entropy::HminOptions& hopts = {},
                               AncillaStrategy strategy = AncillaStrategy::kOptimal);

// Distance chain: d1 against the square-root failure probability, the
// hashing bound from the certified lower entropy end, and the constant
// factor tying the two.
PaVerifyResult verify_lhl_like(const PaInstance& inst, double tol,
                               const entropy::HminOptions& hopts = {},
                               AncillaStrategy strategy = AncillaStrategy::kOptimal);

// Smoothed chain with candidate states inside the purified-distance ball.
PaVerifyResult verify_corollary2(const PaInstance& inst, const std::vector<Matrix>& candidates,
                                 double eps, double tol, const entropy::HminOptions& hopts = {});

// Seeded random instance; blocks blend a common environment state with
// per-string noise of the given strength (leak = 0 gives equal blocks).
PaInstance random_instance(int n, int m, int d_e, double leak, std::mt19937_64& rng,
                           double total_trace = 1.0);

// Instance whose block at a = 0 carries a distinguishable spike of the given
// mass; dropping the spike is a good smoothing candidate.
PaInstance spiked_instance(int n, int m, double spike_mass);

}  // namespace papec::pa
