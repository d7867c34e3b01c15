#pragma once

#include <map>
#include <string>
#include <vector>

#include "papec/hilbert.hpp"

// Distances, fidelities and the security functionals: d1, D1, phase error
// probability, correctness failure probability.

namespace papec::metrics {

using hilbert::Matrix;
using hilbert::State;

// Tr|rho - sigma| via Hermitian eigenvalues.
double l1_distance(const State& rho, const State& sigma);
double l1_distance(const Matrix& rho, const Matrix& sigma);

// ||sqrt(rho) sqrt(sigma)||_1 = Tr sqrt(sqrt(rho) sigma sqrt(rho)).
double root_fidelity(const Matrix& rho, const Matrix& sigma);

// Root fidelity plus sqrt((1-Tr rho)(1-Tr sigma)); the usual fidelity when
// either argument is normalized.
double fidelity_generalized(const State& rho, const State& sigma);
double fidelity_generalized(const Matrix& rho, const Matrix& sigma);

// sqrt(1 - F^2) with the generalized fidelity.
double purified_distance(const State& rho, const State& sigma);
double purified_distance(const Matrix& rho, const Matrix& sigma);

// 2^-m sum_k |k><k| x rho_E on registers [K, E...].
State ideal_key_state(const Matrix& rho_e, int m, const std::string& k_name,
                      const hilbert::SystemLayout& e_layout);

// One hash-ensemble member: the key-side state for a fixed hash choice.
struct KeyEnsembleMember {
  double prob = 0.0;
  State state;  // on [K, E...] (or [K, K', E...] for the joint version)
};

// sum_g p(g) || rho_KE^{fin,g} - ideal ||_1, with the single rho_E shared by
// all members (the reduced state of the input, unchanged by hashing).
double d1_key(const std::vector<KeyEnsembleMember>& ensemble, const Matrix& rho_e, int m);

// Joint-key analogue with the ideal perfectly correlated on K, K'.
double D1_security(const std::vector<KeyEnsembleMember>& ensemble, const Matrix& rho_e, int m);

// Failure mass Tr rho_reg - <0~| rho_reg |0~> of the reduction onto the
// given qubit register. Coincides with 1 - <0~|rho|0~> for normalized
// inputs and extends linearly in the trace for sub-normalized ones.
double phase_error_probability(const State& rho, const std::string& reg);

// sum_{k != k'} <k k'| rho |k k'>; requires rho classical on K, K'.
double correctness_failure(const State& rho_kk, const std::string& k_name,
                           const std::string& kp_name, double classical_tol = 1e-9);

struct SecurityReport {
  double d1 = 0.0;
  double D1 = 0.0;
  bool has_D1 = false;
  double phase_error = 0.0;
  double correctness_failure = 0.0;
  std::map<std::string, double> per_g;  // keyed by the hash matrix text form
};

}  // namespace papec::metrics
