#include "papec/entropy.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "papec/metrics.hpp"

namespace papec::entropy {

namespace {

constexpr double kFeasTol = 1e-9;

// Orthonormal Hermitian basis of dim x dim matrices.
std::vector<Matrix> hermitian_basis(int dim) {
  std::vector<Matrix> basis;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    Matrix b = Matrix::Zero(dim, dim);
    b(i, i) = 1.0;
    basis.push_back(b);
  }
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      Matrix b = Matrix::Zero(dim, dim);
      b(i, j) = inv_sqrt2;
      b(j, i) = inv_sqrt2;
      basis.push_back(b);
      Matrix c = Matrix::Zero(dim, dim);
      c(i, j) = hilbert::Complex(0, -inv_sqrt2);
      c(j, i) = hilbert::Complex(0, inv_sqrt2);
      basis.push_back(c);
    }
  return basis;
}

Matrix embed_first(const Matrix& x, int dim_a) {
  return hilbert::kron(Matrix::Identity(dim_a, dim_a), x);
}

// log det of a positive definite slack; returns false if not PD.
bool logdet_pd(const Matrix& s, double* out) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) return false;
  double ld = 0;
  for (int i = 0; i < s.rows(); ++i) {
    const double d = llt.matrixL()(i, i).real();
    if (d <= 0) return false;
    ld += std::log(d);
  }
  *out = 2.0 * ld;
  return true;
}

double log2_safe(double x) {
  if (x <= 0) throw std::runtime_error("hmin_interval: nonpositive certificate value");
  return std::log2(x);
}

}  // namespace

Matrix trace_out_first(const Matrix& m, int dim_a, int dim_e) {
  Matrix out = Matrix::Zero(dim_e, dim_e);
  for (int a = 0; a < dim_a; ++a) out += m.block(a * dim_e, a * dim_e, dim_e, dim_e);
  return out;
}

std::pair<Matrix, int> reorder_front(const State& rho, const std::vector<std::string>& front) {
  hilbert::Partition part(rho.layout, rho.layout.keep(front).names());
  const auto& so = part.sub_offsets();
  const auto& ro = part.rest_offsets();
  const int da = part.sub_dim();
  const int dr = part.rest_dim();
  Matrix out(da * dr, da * dr);
  for (int a = 0; a < da; ++a)
    for (int j = 0; j < dr; ++j)
      for (int a2 = 0; a2 < da; ++a2)
        for (int j2 = 0; j2 < dr; ++j2)
          out(a * dr + j, a2 * dr + j2) = rho.mat(so[a] + ro[j], so[a2] + ro[j2]);
  return {out, da};
}

EntropyInterval hmin_interval(const Matrix& rho_in, int dim_a, int dim_e,
                              const HminOptions& opts) {
  const int D = dim_a * dim_e;
  if (rho_in.rows() != D || rho_in.cols() != D)
    throw std::invalid_argument("hmin_interval: dimension mismatch");
  if (D > 1024) throw std::invalid_argument("hmin_interval: dimension cap exceeded");
  const Matrix rho = hilbert::hermitize(rho_in);
  if (rho.trace().real() <= 1e-14)
    throw std::invalid_argument("hmin_interval: input has (near) zero trace");

  const std::vector<Matrix> basis = hermitian_basis(dim_e);
  const int p = static_cast<int>(basis.size());

  // Strictly feasible start: X = (lambda_max(rho) + margin) I.
  Eigen::SelfAdjointEigenSolver<Matrix> es_rho(rho, Eigen::EigenvaluesOnly);
  const double lam_max = es_rho.eigenvalues().maxCoeff();
  Matrix X = (lam_max + std::max(1e-8, 0.01 * lam_max)) * Matrix::Identity(dim_e, dim_e);

  EntropyInterval best;
  best.X = X;
  best.lower = -log2_safe(X.trace().real());
  best.Y = Matrix::Identity(D, D) / dim_a;
  best.upper = -log2_safe((rho * best.Y).trace().real());
  best.gap = best.upper - best.lower;

  double t = 1.0;
  int newton_total = 0;
  const int max_outer = 60;
  for (int outer = 0; outer < max_outer && newton_total < opts.max_newton; ++outer) {
    // Newton-center f_t(X) = t Tr X - log det(I x X - rho).
    for (int it = 0; it < 60 && newton_total < opts.max_newton; ++it, ++newton_total) {
      const Matrix S = embed_first(X, dim_a) - rho;
      Eigen::LLT<Matrix> llt(S);
      if (llt.info() != Eigen::Success)
        throw std::runtime_error("hmin_interval: slack lost definiteness");
      const Matrix Sinv = llt.solve(Matrix::Identity(D, D));
      const Matrix W = trace_out_first(Sinv, dim_a, dim_e);
      Eigen::VectorXd grad(p);
      for (int k = 0; k < p; ++k)
        grad(k) = t * basis[k].trace().real() - (W * basis[k]).trace().real();
      Eigen::MatrixXd hess(p, p);
      for (int l = 0; l < p; ++l) {
        const Matrix M = Sinv * embed_first(basis[l], dim_a) * Sinv;
        const Matrix Ma = trace_out_first(M, dim_a, dim_e);
        for (int k = 0; k < p; ++k) hess(k, l) = (Ma * basis[k]).trace().real();
      }
      hess = 0.5 * (hess + hess.transpose());
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess + 1e-13 * Eigen::MatrixXd::Identity(p, p));
      const Eigen::VectorXd step = ldlt.solve(-grad);
      const double decrement = -0.5 * grad.dot(step);
      Matrix dX = Matrix::Zero(dim_e, dim_e);
      for (int k = 0; k < p; ++k) dX += step(k) * basis[k];
      double f0;
      if (!logdet_pd(S, &f0)) throw std::runtime_error("hmin_interval: slack not PD");
      f0 = t * X.trace().real() - f0;
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        const Matrix Xn = X + alpha * dX;
        double ld;
        if (!logdet_pd(embed_first(Xn, dim_a) - rho, &ld)) continue;
        const double fn = t * Xn.trace().real() - ld;
        if (fn <= f0 - 1e-14) {
          X = Xn;
          moved = true;
          break;
        }
        if (fn <= f0 && alpha < 1e-6) {  // stagnation near the center
          X = Xn;
          moved = true;
          break;
        }
      }
      if (!moved || std::abs(decrement) < 1e-13) break;
    }

    // Certificates at (approximately) the analytic center.
    const Matrix S = embed_first(X, dim_a) - rho;
    Eigen::LLT<Matrix> llt(S);
    if (llt.info() != Eigen::Success) throw std::runtime_error("hmin_interval: slack not PD");
    Matrix Y = llt.solve(Matrix::Identity(D, D)) / t;
    // Restore Tr_A Y = I exactly; the residual is the Newton gradient / t.
    const Matrix delta = Matrix::Identity(dim_e, dim_e) - trace_out_first(Y, dim_a, dim_e);
    Y += embed_first(delta, dim_a) / dim_a;
    Y = hilbert::hermitize(Y);
    double lam_min_y = hilbert::min_eigenvalue(Y);
    if (lam_min_y < 0) {
      // Blend with the feasible point I/dim_a to restore positivity.
      const double y0 = 1.0 / dim_a;
      double theta = (-lam_min_y + 1e-14) / (-lam_min_y + y0);
      theta = std::min(1.0, std::max(0.0, theta));
      Y = (1.0 - theta) * Y + theta * (Matrix::Identity(D, D) / dim_a);
      lam_min_y = hilbert::min_eigenvalue(Y);
    }

    EntropyInterval cur;
    cur.X = X;
    cur.Y = Y;
    cur.lower = -log2_safe(X.trace().real());
    cur.upper = -log2_safe((rho * Y).trace().real());
    cur.gap = cur.upper - cur.lower;
    cur.newton_steps = newton_total;
    if (lam_min_y >= -kFeasTol && cur.gap <= best.gap) best = cur;
    if (best.gap <= opts.tol_bits) {
      best.converged = true;
      break;
    }
    t *= 8.0;
  }
  best.newton_steps = newton_total;
  if (best.gap <= opts.tol_bits) best.converged = true;
  return best;
}

EntropyInterval hmin_interval(const State& rho, const std::vector<std::string>& a_regs,
                              const HminOptions& opts) {
  auto [mat, da] = reorder_front(rho, a_regs);
  return hmin_interval(mat, da, static_cast<int>(mat.rows()) / da, opts);
}

void validate_interval(const EntropyInterval& iv, const Matrix& rho, int dim_a, int dim_e,
                       double feas_tol) {
  const int D = dim_a * dim_e;
  if (iv.X.rows() != dim_e || iv.Y.rows() != D)
    throw std::runtime_error("validate_interval: certificate dimensions");
  const Matrix S = embed_first(iv.X, dim_a) - rho;
  if (hilbert::min_eigenvalue(S) < -feas_tol)
    throw std::runtime_error("validate_interval: primal certificate infeasible");
  if (hilbert::min_eigenvalue(iv.Y) < -feas_tol)
    throw std::runtime_error("validate_interval: dual certificate not PSD");
  const Matrix delta = trace_out_first(iv.Y, dim_a, dim_e) - Matrix::Identity(dim_e, dim_e);
  if (delta.cwiseAbs().maxCoeff() > feas_tol)
    throw std::runtime_error("validate_interval: dual marginal constraint violated");
  if (std::abs(iv.lower + std::log2(iv.X.trace().real())) > 1e-9)
    throw std::runtime_error("validate_interval: lower end inconsistent with Tr X");
  if (std::abs(iv.upper + std::log2((rho * iv.Y).trace().real())) > 1e-9)
    throw std::runtime_error("validate_interval: upper end inconsistent with Tr(rho Y)");
  if (iv.lower > iv.upper + 1e-9)
    throw std::runtime_error("validate_interval: crossed bracket");
}

double renyi_half(const std::vector<double>& p) {
  long double s = 0;
  for (double v : p) {
    if (v < -1e-12) throw std::invalid_argument("renyi_half: negative probability");
    s += std::sqrt(static_cast<long double>(std::max(0.0, v)));
  }
  if (s <= 0) throw std::invalid_argument("renyi_half: all-zero distribution");
  return 2.0 * static_cast<double>(std::log2(s));
}

SandwichedPair sandwiched_down_pair(const Matrix& rho_ke, int dim_k, int dim_e) {
  if (rho_ke.rows() != dim_k * dim_e)
    throw std::invalid_argument("sandwiched_down_pair: dimension mismatch");
  const Matrix rho_e = trace_out_first(rho_ke, dim_k, dim_e);
  SandwichedPair out;
  const Matrix marginal = embed_first(rho_e, dim_k);
  out.h_half_down = 2.0 * std::log2(metrics::root_fidelity(marginal, rho_ke));
  const Matrix m = embed_first(hilbert::pinv_sqrt_psd(rho_e), dim_k);
  const Matrix w = rho_ke * m;
  out.h2_down = -std::log2((w * w).trace().real());
  if (out.h_half_down < out.h2_down - 1e-9)
    throw std::runtime_error("sandwiched_down_pair: ordering violated");
  return out;
}

HmaxInterval hmax_via_duality(const hilbert::Ket& psi, const std::vector<std::string>& a_regs,
                              const std::vector<std::string>& b_regs,
                              const std::vector<std::string>& c_regs, const HminOptions& opts) {
  for (const auto& n : psi.layout.names()) {
    const bool in_a = std::count(a_regs.begin(), a_regs.end(), n) > 0;
    const bool in_b = std::count(b_regs.begin(), b_regs.end(), n) > 0;
    const bool in_c = std::count(c_regs.begin(), c_regs.end(), n) > 0;
    if (static_cast<int>(in_a) + static_cast<int>(in_b) + static_cast<int>(in_c) != 1)
      throw std::invalid_argument("hmax_via_duality: registers must partition the layout");
  }
  std::vector<std::string> ac = a_regs;
  ac.insert(ac.end(), c_regs.begin(), c_regs.end());
  const State rho_ac = hilbert::reduce_ket(psi, psi.layout.keep(ac).names());
  const EntropyInterval iv = hmin_interval(rho_ac, a_regs, opts);
  HmaxInterval out;
  out.lower = -iv.upper;
  out.upper = -iv.lower;
  out.dual = iv;
  return out;
}

SmoothLowerBound smooth_hmin_lower(const Matrix& rho, int dim_a, int dim_e,
                                   const std::vector<Matrix>& candidates, double eps,
                                   const HminOptions& opts) {
  SmoothLowerBound out;
  out.lower = hmin_interval(rho, dim_a, dim_e, opts).lower;
  out.candidate_index = -1;
  out.distance = 0.0;
  for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
    const double dist = metrics::purified_distance(candidates[i], rho);
    if (dist > eps + 1e-12) continue;
    const double lower = hmin_interval(candidates[i], dim_a, dim_e, opts).lower;
    if (lower > out.lower) {
      out.lower = lower;
      out.candidate_index = i;
      out.distance = dist;
    }
  }
  return out;
}

UncertaintyCheck uncertainty_relation_check(const hilbert::Ket& psi, const std::string& a_reg,
                                            const std::vector<std::string>& abar_regs,
                                            const std::vector<std::string>& e_regs, double tol,
                                            const HminOptions& opts) {
  UncertaintyCheck out;
  const int da = psi.layout.dim_of(a_reg);
  int n = 0;
  while ((1 << n) < da) ++n;
  out.n_qubits = n;

  // Z-measured side: the (A,E) reduction dephased in the Z basis of A.
  std::vector<std::string> ae{a_reg};
  ae.insert(ae.end(), e_regs.begin(), e_regs.end());
  State rho_z = hilbert::reduce_ket(psi, psi.layout.keep(ae).names());
  rho_z = hilbert::dephase_z(rho_z, a_reg);
  out.hmin_z_lower = hmin_interval(rho_z, {a_reg}, opts).lower;

  // X-measured side: purify the measured state by copying the phase value
  // into a fresh register, then use H_max(A|Abar) = -H_min(A|E,copy).
  const std::string copy_reg = "xcopy";
  hilbert::Ket ext = hilbert::tensor(
      psi, hilbert::basis_ket(hilbert::SystemLayout::single(copy_reg, da), 0));
  ext = hilbert::apply(hilbert::x_basis_copy(a_reg, copy_reg, n), ext);
  std::vector<std::string> c_regs = e_regs;
  c_regs.push_back(copy_reg);
  const HmaxInterval hmax = hmax_via_duality(ext, {a_reg}, abar_regs, c_regs, opts);
  out.hmax_x_lower = hmax.lower;

  out.sum_lower = out.hmin_z_lower + out.hmax_x_lower;
  out.holds = out.sum_lower >= n - tol;
  return out;
}

}  // namespace papec::entropy
