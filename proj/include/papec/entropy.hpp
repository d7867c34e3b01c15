#pragma once

#include <string>
#include <vector>

#include "papec/hilbert.hpp"

// Certified conditional min-entropy brackets, Renyi-1/2 entropy, sandwiched
// conditional Renyi quantities, max-entropy via duality, candidate-based
// smoothing.

namespace papec::entropy {

using hilbert::Matrix;
using hilbert::State;

// Certified bracket on H_min(A|E) in bits.
//
// Any X with I_A x X >= rho gives H_min >= -log2 Tr X (primal certificate);
// any Y >= 0 with Tr_A Y = I_E gives H_min <= -log2 Tr(rho Y) (dual
// certificate). The bracket is valid regardless of solver quality.
struct EntropyInterval {
  double lower = 0.0;   // bits, from X
  double upper = 0.0;   // bits, from Y
  Matrix X;             // on E
  Matrix Y;             // on A x E
  double gap = 0.0;     // upper - lower
  bool converged = false;
  int newton_steps = 0;
};

struct HminOptions {
  double tol_bits = 1e-4;
  int max_newton = 100000;
};

// rho is indexed (a, e) row-major, dim = dim_a * dim_e.
EntropyInterval hmin_interval(const Matrix& rho, int dim_a, int dim_e,
                              const HminOptions& opts = {});

// Split a multi-register state as (A regs | rest); A goes in front.
EntropyInterval hmin_interval(const State& rho, const std::vector<std::string>& a_regs,
                              const HminOptions& opts = {});

// Re-checks both certificates from scratch; throws on violation.
void validate_interval(const EntropyInterval& iv, const Matrix& rho, int dim_a, int dim_e,
                       double feas_tol = 1e-9);

// Partial trace over the A factor of a matrix indexed (a, e) row-major.
Matrix trace_out_first(const Matrix& m, int dim_a, int dim_e);

// Reorders a state's matrix so the given registers come first (row-major);
// returns the matrix and the front block dimension.
std::pair<Matrix, int> reorder_front(const State& rho, const std::vector<std::string>& front);

// Renyi entropy of degree 1/2 in bits: 2 log2( sum_x sqrt(p_x) ). Accepts
// sub-normalized weight vectors.
double renyi_half(const std::vector<double>& p);

struct SandwichedPair {
  double h_half_down = 0.0;  // 2 log2 F(I_K x rho_E, rho_KE)
  double h2_down = 0.0;      // -log2 Tr{ (rho_KE (I x rho_E^{-1/2}))^2 }
};
// Computes both quantities for rho indexed (k, e) row-major and checks the
// ordering h_half_down >= h2_down.
SandwichedPair sandwiched_down_pair(const Matrix& rho_ke, int dim_k, int dim_e);

struct HmaxInterval {
  double lower = 0.0;
  double upper = 0.0;
  EntropyInterval dual;  // the H_min(A|C) bracket it came from
};
// H_max(A|B) = -H_min(A|C) on a pure state over A, B, C.
HmaxInterval hmax_via_duality(const hilbert::Ket& psi, const std::vector<std::string>& a_regs,
                              const std::vector<std::string>& b_regs,
                              const std::vector<std::string>& c_regs,
                              const HminOptions& opts = {});

struct SmoothLowerBound {
  double lower = 0.0;
  int candidate_index = -1;  // -1 = the state itself
  double distance = 0.0;     // purified distance of the winning candidate
};
// Max of hmin lower bounds over {rho} and the candidates within purified
// distance eps of rho. A certified lower bound on the smooth min-entropy,
// never claimed tight.
SmoothLowerBound smooth_hmin_lower(const Matrix& rho, int dim_a, int dim_e,
                                   const std::vector<Matrix>& candidates, double eps,
                                   const HminOptions& opts = {});

struct UncertaintyCheck {
  double hmin_z_lower = 0.0;   // H_min(Z-measured A | E), certified lower end
  double hmax_x_lower = 0.0;   // H_max(X-measured A | Abar), certified lower end
  double sum_lower = 0.0;
  int n_qubits = 0;
  bool holds = false;  // sum_lower >= n - tol
};
// Uncertainty relation H_min(Z-mea A|E) + H_max(X-mea A|Abar) >= n on a
// (possibly sub-normalized) pure ket over A, Abar, E. H_max is evaluated by
// duality on an explicit purification of the X-measured state.
UncertaintyCheck uncertainty_relation_check(const hilbert::Ket& psi, const std::string& a_reg,
                                            const std::vector<std::string>& abar_regs,
                                            const std::vector<std::string>& e_regs, double tol,
                                            const HminOptions& opts = {});

}  // namespace papec::entropy
