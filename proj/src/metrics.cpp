#include "papec/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace papec::metrics {

using hilbert::dagger;

double l1_distance(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw std::invalid_argument("l1_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hilbert::hermitize(rho - sigma), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double l1_distance(const State& rho, const State& sigma) {
  if (!(rho.layout == sigma.layout)) throw std::invalid_argument("l1_distance: layout mismatch");
  return l1_distance(rho.mat, sigma.mat);
}

double root_fidelity(const Matrix& rho, const Matrix& sigma) {
  const Matrix sq = hilbert::sqrt_psd(rho);
  Eigen::SelfAdjointEigenSolver<Matrix> es(hilbert::hermitize(sq * sigma * sq), Eigen::EigenvaluesOnly);
  double f = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) f += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  return f;
}

double fidelity_generalized(const Matrix& rho, const Matrix& sigma) {
  const double tr = std::max(0.0, 1.0 - rho.trace().real());
  const double ts = std::max(0.0, 1.0 - sigma.trace().real());
  return root_fidelity(rho, sigma) + std::sqrt(tr * ts);
}

double fidelity_generalized(const State& rho, const State& sigma) {
  if (!(rho.layout == sigma.layout))
    throw std::invalid_argument("fidelity_generalized: layout mismatch");
  return fidelity_generalized(rho.mat, sigma.mat);
}

double purified_distance(const Matrix& rho, const Matrix& sigma) {
  const double f = std::min(1.0, fidelity_generalized(rho, sigma));
  return std::sqrt(std::max(0.0, 1.0 - f * f));
}

double purified_distance(const State& rho, const State& sigma) {
  return purified_distance(rho.mat, sigma.mat);
}

State ideal_key_state(const Matrix& rho_e, int m, const std::string& k_name,
                      const hilbert::SystemLayout& e_layout) {
  const int dk = 1 << m;
  const int de = static_cast<int>(rho_e.rows());
  State out;
  out.layout = hilbert::SystemLayout::single(k_name, dk).concat(e_layout);
  out.mat = Matrix::Zero(dk * de, dk * de);
  const Matrix block = rho_e / static_cast<double>(dk);
  for (int k = 0; k < dk; ++k) out.mat.block(k * de, k * de, de, de) = block;
  return out;
}

double d1_key(const std::vector<KeyEnsembleMember>& ensemble, const Matrix& rho_e, int m) {
  if (ensemble.empty()) throw std::invalid_argument("d1_key: empty ensemble");
  const State ideal =
      ideal_key_state(rho_e, m, ensemble.front().state.layout.reg(0).name,
                      ensemble.front().state.layout.drop({ensemble.front().state.layout.reg(0).name}));
  double d = 0;
  for (const auto& mem : ensemble) d += mem.prob * l1_distance(mem.state, ideal);
  return d;
}

double D1_security(const std::vector<KeyEnsembleMember>& ensemble, const Matrix& rho_e, int m) {
  if (ensemble.empty()) throw std::invalid_argument("D1_security: empty ensemble");
  const auto& layout = ensemble.front().state.layout;
  const int dk = 1 << m;
  const int de = static_cast<int>(rho_e.rows());
  if (layout.total_dim() != dk * dk * de)
    throw std::invalid_argument("D1_security: layout/key length mismatch");
  Matrix ideal = Matrix::Zero(dk * dk * de, dk * dk * de);
  const Matrix block = rho_e / static_cast<double>(dk);
  for (int k = 0; k < dk; ++k) {
    const int off = (k * dk + k) * de;
    ideal.block(off, off, de, de) = block;
  }
  double d = 0;
  for (const auto& mem : ensemble) d += mem.prob * l1_distance(mem.state.mat, ideal);
  return d;
}

double phase_error_probability(const State& rho, const std::string& reg) {
  const State red = hilbert::partial_trace(rho, {reg});
  const int dim = red.layout.total_dim();
  // <0~|rho|0~> = mean of all matrix entries.
  const double good = (red.mat.sum().real()) / static_cast<double>(dim);
  return red.trace() - good;
}

double correctness_failure(const State& rho_kk, const std::string& k_name,
                           const std::string& kp_name, double classical_tol) {
  const State red = hilbert::partial_trace(rho_kk, {k_name, kp_name});
  const int dk = red.layout.dim_of(k_name);
  const int dkp = red.layout.dim_of(kp_name);
  double off_diag = 0;
  for (int i = 0; i < dk * dkp; ++i)
    for (int j = 0; j < dk * dkp; ++j)
      if (i != j) off_diag = std::max(off_diag, std::abs(red.mat(i, j)));
  if (off_diag > classical_tol)
    throw std::runtime_error("correctness_failure: key registers not classical");
  double fail = 0;
  for (int k = 0; k < dk; ++k)
    for (int kp = 0; kp < dkp; ++kp)
      if (k != kp) fail += red.mat(k * dkp + kp, k * dkp + kp).real();
  return fail;
}

}  // namespace papec::metrics
