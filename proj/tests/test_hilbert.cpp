#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "papec/gf2.hpp"
#include "papec/hilbert.hpp"
#include "papec/metrics.hpp"

using namespace papec;
using gf2::BitVector;
using hilbert::Complex;
using hilbert::Ket;
using hilbert::Matrix;
using hilbert::Operator;
using hilbert::State;
using hilbert::SystemLayout;

namespace {

std::mt19937_64 rng(2024);

Matrix random_density(int d) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

Ket random_ket(const SystemLayout& layout) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  hilbert::Vector v(layout.total_dim());
  for (int i = 0; i < v.size(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
  v.normalize();
  return Ket{layout, v};
}

hilbert::CqState random_cq(int n, int d_e, double trace = 1.0) {
  hilbert::CqState cq;
  cq.n = n;
  cq.e_layout = SystemLayout::single("E", d_e);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  double total = 0;
  std::vector<double> w(1 << n);
  for (auto& x : w) {
    x = unif(rng);
    total += x;
  }
  for (int a = 0; a < (1 << n); ++a) cq.blocks.emplace(a, (trace * w[a] / total) * random_density(d_e));
  return cq;
}

}  // namespace

TEST_CASE("tensor products") {
  const Ket zero = hilbert::basis_ket(SystemLayout::single("a", 2), 0);
  const Ket one = hilbert::basis_ket(SystemLayout::single("b", 2), 1);
  const Ket z01 = hilbert::tensor(zero, one);
  CHECK(z01.amp(1) == Complex(1, 0));

  const Operator z = hilbert::pauli_string_z(BitVector::from_string("1"), "a");
  const Operator id = hilbert::identity_op(SystemLayout::single("b", 2));
  const Ket v11 = hilbert::basis_ket(SystemLayout({{"a", 2}, {"b", 2}}), 3);
  const Ket out = hilbert::apply(hilbert::tensor(z, id), v11);
  CHECK(out.amp(3) == Complex(-1, 0));

  const SystemLayout l23({{"x", 2}, {"y", 3}});
  CHECK(l23.total_dim() == 6);
  CHECK_THROWS(SystemLayout({{"x", 2}, {"x", 2}}));
}

TEST_CASE("partial trace") {
  const Matrix rho_a = random_density(3);
  const Matrix sig_b = random_density(4);
  State joint{SystemLayout({{"A", 3}, {"B", 4}}), hilbert::kron(rho_a, sig_b)};
  const State red = hilbert::partial_trace(joint, {"A"});
  CHECK((red.mat - rho_a).cwiseAbs().maxCoeff() < 1e-12);

  // Bell pair: either side is maximally mixed.
  Ket bell = hilbert::zero_ket(SystemLayout({{"A", 2}, {"B", 2}}));
  bell.amp(0) = bell.amp(3) = 1.0 / std::sqrt(2.0);
  const State rb = hilbert::reduce_ket(bell, {"B"});
  CHECK((rb.mat - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  const State all_traced = hilbert::partial_trace(joint, {});
  CHECK(std::abs(all_traced.mat(0, 0).real() - 1.0) < 1e-12);
}

TEST_CASE("partial trace of product states over random draws") {
  for (int t = 0; t < 20; ++t) {
    const int da = 2 + static_cast<int>(rng() % 7);
    const int db = 2 + static_cast<int>(rng() % 7);
    const Matrix a = random_density(da);
    Matrix b = random_density(db);
    b *= 0.7;  // sub-normalized factor
    State joint{SystemLayout({{"A", da}, {"B", db}}), hilbert::kron(a, b)};
    const State red = hilbert::partial_trace(joint, {"A"});
    CHECK((red.mat - b.trace().real() * a).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pauli strings and phase kets") {
  const Operator z11 = hilbert::pauli_string_z(BitVector::from_string("11"), "A");
  const Ket v10 = hilbert::basis_ket(SystemLayout::single("A", 4), 2);
  CHECK(hilbert::apply(z11, v10).amp(2) == Complex(-1, 0));

  const Operator x01 = hilbert::pauli_string_x(BitVector::from_string("01"), "A");
  CHECK(hilbert::apply(x01, v10).amp(3) == Complex(1, 0));

  const Operator z0 = hilbert::pauli_string_z(BitVector::from_string("00"), "A");
  CHECK((z0.mat - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  const Ket plus = hilbert::phase_basis_ket(BitVector::from_string("0"), "q");
  CHECK(std::abs(plus.amp(0).real() - 1 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(plus.amp(1).real() - 1 / std::sqrt(2.0)) < 1e-12);
  const Ket minus = hilbert::phase_basis_ket(BitVector::from_string("1"), "q");
  CHECK(std::abs(minus.amp(1).real() + 1 / std::sqrt(2.0)) < 1e-12);

  // Orthonormality over all pairs for d = 3, and the X eigenvalue relation.
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      const Ket kx = hilbert::phase_basis_ket(BitVector::from_basis_index(3, x), "q");
      const Ket ky = hilbert::phase_basis_ket(BitVector::from_basis_index(3, y), "q");
      CHECK(std::abs(hilbert::inner(kx, ky) - Complex(x == y ? 1 : 0, 0)) < 1e-12);
    }
  for (int x = 0; x < 8; ++x)
    for (int xp = 0; xp < 8; ++xp) {
      const BitVector xv = BitVector::from_basis_index(3, x);
      const BitVector xpv = BitVector::from_basis_index(3, xp);
      const Ket kx = hilbert::phase_basis_ket(xv, "q");
      const Ket out = hilbert::apply(hilbert::pauli_string_x(xpv, "q"), kx);
      const double sign = xv.dot(xpv) ? -1.0 : 1.0;
      CHECK((out.amp - sign * kx.amp).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("cnot forms and involution") {
  for (int d = 1; d <= 2; ++d) {
    const Operator n = hilbert::cnot("C", "T", d);
    // |z>|0> -> |z>|z>
    for (int z = 0; z < (1 << d); ++z) {
      const Ket in = hilbert::basis_ket(n.layout, z * (1 << d));
      const Ket out = hilbert::apply(n, in);
      CHECK(std::abs(out.amp(z * (1 << d) + z) - Complex(1, 0)) < 1e-12);
    }
    CHECK((n.mat * n.mat - Matrix::Identity(n.mat.rows(), n.mat.cols())).cwiseAbs().maxCoeff() <
          1e-12);
    // Dual defining form sum_x Z^x x |x~><x~|.
    Matrix alt = Matrix::Zero(n.mat.rows(), n.mat.cols());
    for (int x = 0; x < (1 << d); ++x) {
      const BitVector xv = BitVector::from_basis_index(d, x);
      alt += hilbert::kron(hilbert::pauli_string_z(xv, "C").mat,
                           hilbert::phase_projector(xv, "T").mat);
    }
    CHECK((n.mat - alt).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("measurement channels") {
  const auto zmea = hilbert::z_measurement_channel("A", 4);
  zmea.validate();
  State diag{SystemLayout::single("A", 4), Matrix::Zero(4, 4)};
  diag.mat(0, 0) = 0.5;
  diag.mat(3, 3) = 0.5;
  CHECK((hilbert::apply(zmea, diag).mat - diag.mat).cwiseAbs().maxCoeff() < 1e-12);

  // Z-measuring |+><+| gives the maximally mixed state.
  const Ket plus = hilbert::phase_basis_ket(BitVector::from_string("0"), "A");
  State pp{plus.layout, plus.amp * plus.amp.adjoint()};
  CHECK((hilbert::apply(hilbert::z_measurement_channel("A", 2), pp).mat -
         0.5 * Matrix::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  // Idempotence on a random state.
  const auto xmea = hilbert::x_measurement_channel("A", 2);
  xmea.validate();
  State rho{SystemLayout::single("A", 4), random_density(4)};
  const State once = hilbert::apply(xmea, rho);
  const State twice = hilbert::apply(xmea, once);
  CHECK((once.mat - twice.mat).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("permutation unitary conjugation relations") {
  CHECK((hilbert::permutation_unitary_from_gf2(gf2::BitMatrix::identity(2), "A").mat -
         Matrix::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  // For a valid code triple (g, h, v): V Z^{g_i} V^dag = Z_i and
  // V X^{h_j} V^dag = X_{m+j}.
  std::mt19937_64 local(5);
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 3 + (trial % 2);
    const int m = 1 + static_cast<int>(local() % 2);
    gf2::BitMatrix g(m, n);
    do {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) g.set(i, j, static_cast<int>(local() & 1));
    } while (gf2::rank(g) != m);
    const gf2::BitMatrix h = gf2::complete_check_matrix(g);
    const gf2::BitMatrix v = gf2::extend_basis(g, h);
    const Operator vop = hilbert::permutation_unitary_from_gf2(v, "A");
    for (int i = 0; i < m; ++i) {
      BitVector ei = BitVector::zero(n);
      ei.set_bit(i, 1);
      const Matrix lhs = vop.mat * hilbert::pauli_string_z(g.row(i), "A").mat * vop.mat.adjoint();
      const Matrix rhs = hilbert::pauli_string_z(ei, "A").mat;
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
    for (int j = 0; j < n - m; ++j) {
      BitVector ej = BitVector::zero(n);
      ej.set_bit(m + j, 1);
      const Matrix lhs = vop.mat * hilbert::pauli_string_x(h.row(j), "A").mat * vop.mat.adjoint();
      const Matrix rhs = hilbert::pauli_string_x(ej, "A").mat;
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("cq purification") {
  // Point-mass blocks: |Psi> = sum_a sqrt(p_a) |a>|00>|a>.
  hilbert::CqState cq;
  cq.n = 1;
  cq.e_layout = SystemLayout::single("E", 2);
  Matrix b0 = Matrix::Zero(2, 2), b1 = Matrix::Zero(2, 2);
  b0(0, 0) = 0.25;
  b1(0, 0) = 0.75;
  cq.blocks.emplace(0, b0);
  cq.blocks.emplace(1, b1);
  const Ket psi = hilbert::cq_purification(cq, "A", "A1", "A2");
  CHECK(std::abs(psi.norm2() - 1.0) < 1e-12);

  // Trace check on random instances: the (A,E) reduction reproduces the
  // cq state exactly.
  for (int t = 0; t < 10; ++t) {
    const hilbert::CqState c = random_cq(2, 2, 0.9);
    const Ket p = hilbert::cq_purification(c, "A", "A1", "A2");
    CHECK(std::abs(p.norm2() - c.trace()) < 1e-10);
    const State red = hilbert::reduce_ket(p, {"A", "E"});
    CHECK(metrics::l1_distance(red.mat, c.to_state("A").mat) < 1e-10);
  }
}

TEST_CASE("semi-purification predicate") {
  const hilbert::CqState cq = random_cq(2, 2);
  const Ket psi = hilbert::cq_purification(cq, "A", "A1", "A2");
  CHECK(hilbert::is_semi_purification(psi, cq, "A").ok);

  // |+>_A x |0>_E against the uniform cq state with point-mass blocks.
  hilbert::CqState uniform;
  uniform.n = 1;
  uniform.e_layout = SystemLayout::single("E", 2);
  Matrix blk = Matrix::Zero(2, 2);
  blk(0, 0) = 0.5;
  uniform.blocks.emplace(0, blk);
  uniform.blocks.emplace(1, blk);
  const Ket plus = hilbert::tensor(hilbert::phase_basis_ket(BitVector::from_string("0"), "A"),
                                   hilbert::basis_ket(SystemLayout::single("E", 2), 0));
  CHECK(hilbert::is_semi_purification(plus, uniform, "A").ok);

  const Ket zero = hilbert::tensor(hilbert::basis_ket(SystemLayout::single("A", 2), 0),
                                   hilbert::basis_ket(SystemLayout::single("E", 2), 0));
  const auto bad = hilbert::is_semi_purification(zero, uniform, "A");
  CHECK(!bad.ok);
  CHECK(bad.residual == doctest::Approx(1.0));
}

TEST_CASE("twirling") {
  // Twirling |+> makes a Bell pair.
  const Ket plus = hilbert::phase_basis_ket(BitVector::from_string("0"), "A");
  const Ket bell = hilbert::twirl(plus, "A", "T");
  CHECK(std::abs(bell.amp(0) - Complex(1 / std::sqrt(2.0), 0)) < 1e-12);
  CHECK(std::abs(bell.amp(3) - Complex(1 / std::sqrt(2.0), 0)) < 1e-12);
  CHECK(std::abs(bell.norm2() - 1.0) < 1e-12);

  // Twirling a semi-purification yields a purification, on random draws.
  for (int t = 0; t < 8; ++t) {
    const hilbert::CqState cq = random_cq(2, 2, 0.85);
    Ket psi = hilbert::cq_purification(cq, "A", "A1", "A2");
    // Z-diagonal phase rotation on A: still a semi-purification, no longer
    // a purification.
    hilbert::Operator zrot{SystemLayout::single("A", 4), Matrix::Identity(4, 4)};
    zrot.mat(1, 1) = Complex(0, 1);
    zrot.mat(2, 2) = Complex(std::cos(0.4), std::sin(0.4));
    psi = hilbert::apply(zrot, psi);
    CHECK(hilbert::is_semi_purification(psi, cq, "A").ok);
    const Ket tw = hilbert::twirl(psi, "A", "T");
    CHECK(std::abs(tw.norm2() - psi.norm2()) < 1e-12);
    const State red = hilbert::reduce_ket(tw, {"A", "E"});
    CHECK(metrics::l1_distance(red.mat, cq.to_state("A").mat) < 1e-10);
  }
}

TEST_CASE("uhlmann unitary") {
  // Identical states: overlap 1 on normalized inputs.
  const SystemLayout l({{"S", 4}, {"B", 4}});
  const Ket psi = random_ket(l);
  const auto same = hilbert::uhlmann_unitary(psi, psi, {"B"});
  CHECK(same.overlap == doctest::Approx(1.0).epsilon(1e-9));

  // Two purifications of one state: overlap equals its trace.
  for (int t = 0; t < 5; ++t) {
    const hilbert::CqState cq = random_cq(1, 2, 0.8);
    const Ket p1 = hilbert::cq_purification(cq, "A", "A1", "A2");
    const int danc = p1.layout.dim_of("A1") * p1.layout.dim_of("A2");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(danc, danc);
    for (int i = 0; i < danc; ++i)
      for (int j = 0; j < danc; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    const Eigen::HouseholderQR<Matrix> qr(g);
    const Matrix q = qr.householderQ();
    hilbert::Operator rot{p1.layout.keep({"A1", "A2"}), q};
    const Ket p2 = hilbert::apply(rot, p1);
    const auto res = hilbert::uhlmann_unitary(p1, p2, {"A1", "A2"});
    CHECK(res.overlap == doctest::Approx(cq.trace()).epsilon(1e-9));
    const Complex achieved = hilbert::inner(p2, hilbert::apply(res.unitary, p1));
    CHECK(std::abs(achieved - Complex(res.overlap, 0)) < 1e-9);
  }

  // Random pure pairs: the achieved overlap equals the fidelity of the
  // reductions onto the kept system.
  for (int t = 0; t < 100; ++t) {
    const Ket a = random_ket(l);
    const Ket b = random_ket(l);
    const auto res = hilbert::uhlmann_unitary(a, b, {"B"});
    const double f = metrics::fidelity_generalized(hilbert::reduce_ket(a, {"S"}).mat,
                                                   hilbert::reduce_ket(b, {"S"}).mat);
    CHECK(std::abs(res.overlap - f) < 1e-9);
    const Complex achieved = hilbert::inner(b, hilbert::apply(res.unitary, a));
    CHECK(std::abs(achieved - Complex(res.overlap, 0)) < 1e-9);
    CHECK(achieved.real() >= -1e-12);
  }
}

TEST_CASE("state validation and psd clamp") {
  State good{SystemLayout::single("A", 3), random_density(3)};
  good.validate();
  Matrix bad = good.mat;
  bad(0, 1) += Complex(0.2, 0.0);
  State bad_state{SystemLayout::single("A", 3), bad};
  CHECK_THROWS(bad_state.validate());
  CHECK_THROWS(hilbert::psd_clamp(-0.5 * Matrix::Identity(2, 2)));
  const Matrix tiny = -1e-12 * Matrix::Identity(2, 2);
  CHECK(hilbert::min_eigenvalue(hilbert::psd_clamp(tiny)) >= 0.0);
}
