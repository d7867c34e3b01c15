#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "papec/entropy.hpp"
#include "papec/gf2.hpp"
#include "papec/hilbert.hpp"
#include "papec/metrics.hpp"

using namespace papec;
using entropy::EntropyInterval;
using entropy::HminOptions;
using hilbert::Complex;
using hilbert::Ket;
using hilbert::Matrix;
using hilbert::SystemLayout;

namespace {

std::mt19937_64 rng(99);

Matrix random_density(int d, double trace = 1.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Matrix rho = g * g.adjoint();
  return trace * rho / rho.trace().real();
}

// Classical-quantum rho_AE as an (a,e)-indexed matrix.
Matrix cq_matrix(const std::vector<Matrix>& blocks) {
  const int da = static_cast<int>(blocks.size());
  const int de = static_cast<int>(blocks.front().rows());
  Matrix rho = Matrix::Zero(da * de, da * de);
  for (int a = 0; a < da; ++a) rho.block(a * de, a * de, de, de) = blocks[a];
  return rho;
}

HminOptions tight() {
  HminOptions o;
  o.tol_bits = 1e-7;
  return o;
}

}  // namespace

TEST_CASE("hmin: product uniform state has n bits") {
  for (int n = 1; n <= 3; ++n) {
    const int da = 1 << n;
    const Matrix sigma = random_density(2);
    std::vector<Matrix> blocks(da, sigma / da);
    const Matrix rho = cq_matrix(blocks);
    const EntropyInterval iv = entropy::hmin_interval(rho, da, 2, tight());
    entropy::validate_interval(iv, rho, da, 2);
    CHECK(iv.converged);
    CHECK(iv.lower == doctest::Approx(n).epsilon(1e-5));
    CHECK(iv.upper == doctest::Approx(n).epsilon(1e-5));
  }
}

TEST_CASE("hmin: perfect classical copy is fully guessable") {
  const int n = 2;
  const int da = 1 << n;
  std::vector<Matrix> blocks;
  for (int a = 0; a < da; ++a) {
    Matrix b = Matrix::Zero(da, da);
    b(a, a) = 1.0 / da;
    blocks.push_back(b);
  }
  const Matrix rho = cq_matrix(blocks);
  const EntropyInterval iv = entropy::hmin_interval(rho, da, da, tight());
  entropy::validate_interval(iv, rho, da, da);
  CHECK(std::abs(iv.lower) < 1e-5);
  CHECK(std::abs(iv.upper) < 1e-5);
}

TEST_CASE("hmin: trivial environment gives max-probability entropy") {
  const std::vector<double> p{0.5, 0.25, 0.125, 0.125};
  Matrix rho = Matrix::Zero(4, 4);
  for (int a = 0; a < 4; ++a) rho(a, a) = p[a];
  const EntropyInterval iv = entropy::hmin_interval(rho, 4, 1, tight());
  entropy::validate_interval(iv, rho, 4, 1);
  CHECK(iv.lower == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(iv.upper == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hmin matches the classical guessing formula") {
  // Brute-force oracle: H_min = -log2 sum_e max_a p(a,e).
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int da = 2 + static_cast<int>(rng() % 3);
    const int de = 2 + static_cast<int>(rng() % 3);
    std::vector<std::vector<double>> p(da, std::vector<double>(de));
    double total = 0;
    for (auto& row : p)
      for (auto& x : row) {
        x = unif(rng) + 1e-3;
        total += x;
      }
    Matrix rho = Matrix::Zero(da * de, da * de);
    for (int a = 0; a < da; ++a)
      for (int e = 0; e < de; ++e) rho(a * de + e, a * de + e) = p[a][e] / total;
    double guess = 0;
    for (int e = 0; e < de; ++e) {
      double best = 0;
      for (int a = 0; a < da; ++a) best = std::max(best, p[a][e] / total);
      guess += best;
    }
    const double oracle = -std::log2(guess);
    const EntropyInterval iv = entropy::hmin_interval(rho, da, de, tight());
    entropy::validate_interval(iv, rho, da, de);
    CHECK(iv.lower <= oracle + 1e-6);
    CHECK(iv.upper >= oracle - 1e-6);
    CHECK(iv.gap < 1e-6);
  }
}

TEST_CASE("hmin bracket on random dense states") {
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix rho = random_density(8, 0.9);
    const EntropyInterval iv = entropy::hmin_interval(rho, 4, 2, tight());
    entropy::validate_interval(iv, rho, 4, 2);
    CHECK(iv.lower <= iv.upper + 1e-12);
    CHECK(iv.gap < 1e-6);
  }
}

TEST_CASE("renyi half") {
  for (int n = 1; n <= 3; ++n) {
    std::vector<double> p(1 << n, 1.0 / (1 << n));
    CHECK(entropy::renyi_half(p) == doctest::Approx(n).epsilon(1e-12));
  }
  CHECK(entropy::renyi_half({1.0}) == doctest::Approx(0.0));
  CHECK(entropy::renyi_half({0.0, 1.0, 0.0}) == doctest::Approx(0.0));
  // Frozen from the defining formula evaluated in extended precision.
  CHECK(entropy::renyi_half({0.5, 0.25, 0.25}) ==
        doctest::Approx(1.5431066063272239).epsilon(1e-12));
  CHECK_THROWS(entropy::renyi_half({0.0, 0.0}));
}

TEST_CASE("sandwiched conditional quantities") {
  // Uniform independent key: both equal m.
  for (int m = 1; m <= 2; ++m) {
    const int dk = 1 << m;
    const Matrix rho_e = random_density(2);
    const Matrix rho = hilbert::kron(Matrix::Identity(dk, dk) / dk, rho_e);
    const auto pair = entropy::sandwiched_down_pair(rho, dk, 2);
    CHECK(pair.h_half_down == doctest::Approx(m).epsilon(1e-9));
    CHECK(pair.h2_down == doctest::Approx(m).epsilon(1e-9));
  }
  // Point mass: both zero.
  {
    const Matrix rho_e = random_density(2);
    Matrix rho = Matrix::Zero(4, 4);
    rho.block(0, 0, 2, 2) = rho_e;
    const auto pair = entropy::sandwiched_down_pair(rho, 2, 2);
    CHECK(pair.h_half_down == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(pair.h2_down == doctest::Approx(0.0).epsilon(1e-9));
  }
  // Ordering sweep on random cq states, m=2, dE=2.
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Matrix> blocks;
    double total = 0;
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    std::vector<double> w(4);
    for (auto& x : w) {
      x = unif(rng);
      total += x;
    }
    for (int a = 0; a < 4; ++a) blocks.push_back(random_density(2, w[a] / total));
    const Matrix rho = cq_matrix(blocks);
    const auto pair = entropy::sandwiched_down_pair(rho, 4, 2);
    CHECK(pair.h_half_down >= pair.h2_down - 1e-9);
    // The min-entropy never exceeds the collision-type quantity.
    const EntropyInterval iv = entropy::hmin_interval(rho, 4, 2, tight());
    CHECK(iv.upper <= pair.h2_down + 1e-5);
  }
}

TEST_CASE("hmax via duality") {
  // Bell pair with trivial C: H_max(A|B) = -1.
  Ket bell = hilbert::zero_ket(SystemLayout({{"A", 2}, {"B", 2}, {"C", 1}}));
  bell.amp(0) = bell.amp(3) = 1.0 / std::sqrt(2.0);
  const auto hb = entropy::hmax_via_duality(bell, {"A"}, {"B"}, {"C"}, tight());
  CHECK(hb.lower == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(hb.upper == doctest::Approx(-1.0).epsilon(1e-5));

  // Product |0>|0>: H_max(A|B) = 0.
  const Ket prod = hilbert::basis_ket(SystemLayout({{"A", 2}, {"B", 2}, {"C", 1}}), 0);
  const auto hp = entropy::hmax_via_duality(prod, {"A"}, {"B"}, {"C"}, tight());
  CHECK(hp.lower == doctest::Approx(0.0).epsilon(1e-5));

  // Uniform A, trivial B, purifier C: H_max(A) = log2 dim A.
  for (int n = 1; n <= 2; ++n) {
    const int da = 1 << n;
    Ket unif = hilbert::zero_ket(SystemLayout({{"A", da}, {"B", 1}, {"C", da}}));
    for (int a = 0; a < da; ++a) unif.amp(a * da + a) = 1.0 / std::sqrt(da);
    const auto hu = entropy::hmax_via_duality(unif, {"A"}, {"B"}, {"C"}, tight());
    CHECK(hu.lower == doctest::Approx(n).epsilon(1e-5));
  }

  // Maximally entangled A:C has H_min(A|C) = -n.
  Ket ent = hilbert::zero_ket(SystemLayout({{"A", 4}, {"C", 4}}));
  for (int a = 0; a < 4; ++a) ent.amp(a * 4 + a) = 0.5;
  const auto iv = entropy::hmin_interval(hilbert::reduce_ket(ent, {"A", "C"}), {"A"}, tight());
  CHECK(iv.lower == doctest::Approx(-2.0).epsilon(1e-5));
  CHECK(iv.upper == doctest::Approx(-2.0).epsilon(1e-5));
}

TEST_CASE("smooth lower bound") {
  // eps = 0: reduces to the unsmoothed lower bound (the state itself).
  const Matrix rho = cq_matrix({random_density(2, 0.3), random_density(2, 0.7)});
  const auto plain = entropy::hmin_interval(rho, 2, 2, tight());
  const auto smooth0 = entropy::smooth_hmin_lower(rho, 2, 2, {}, 0.0, tight());
  CHECK(smooth0.lower == doctest::Approx(plain.lower).epsilon(1e-9));
  CHECK(smooth0.candidate_index == -1);

  // A candidate outside the ball is ignored.
  const Matrix far = cq_matrix({random_density(2, 0.9), random_density(2, 0.1)});
  const auto rejected = entropy::smooth_hmin_lower(rho, 2, 2, {far}, 1e-3, tight());
  CHECK(rejected.candidate_index == -1);

  // Spiked state: dropping the distinguishable spike raises the bound.
  const double w = 0.1, spike = 0.6;
  Matrix b0 = Matrix::Zero(2, 2), b1 = Matrix::Zero(2, 2);
  b0(0, 0) = w;
  b1(0, 0) = w;
  b0(1, 1) = spike;
  Matrix rest = b1;
  const Matrix spiked = cq_matrix({b0, b1, rest, rest});
  Matrix clamped = spiked;
  clamped(1, 1) = 0.0;  // remove the spike entry (block 0, e = 1)
  const double eps = metrics::purified_distance(clamped, spiked) + 1e-12;
  const auto improved = entropy::smooth_hmin_lower(spiked, 4, 2, {clamped}, eps, tight());
  const auto unsmoothed = entropy::hmin_interval(spiked, 4, 2, tight());
  CHECK(improved.candidate_index == 0);
  CHECK(improved.lower > unsmoothed.lower + 0.5);
}

TEST_CASE("uncertainty relation on random pure states") {
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 2);
    const SystemLayout layout({{"A", 1 << n}, {"Abar", 2}, {"E", 2}});
    std::normal_distribution<double> gauss(0.0, 1.0);
    hilbert::Vector v(layout.total_dim());
    for (int i = 0; i < v.size(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v.normalize();
    const Ket psi{layout, v};
    const auto check = entropy::uncertainty_relation_check(psi, "A", {"Abar"}, {"E"}, 1e-5, tight());
    CHECK(check.n_qubits == n);
    CHECK(check.holds);
  }
}

TEST_CASE("interval validation rejects corrupted certificates") {
  const Matrix rho = cq_matrix({random_density(2, 0.5), random_density(2, 0.5)});
  EntropyInterval iv = entropy::hmin_interval(rho, 2, 2, tight());
  entropy::validate_interval(iv, rho, 2, 2);
  EntropyInterval broken = iv;
  broken.X *= 0.5;  // infeasible primal
  CHECK_THROWS(entropy::validate_interval(broken, rho, 2, 2));
  EntropyInterval crossed = iv;
  crossed.lower = crossed.upper + 1.0;
  CHECK_THROWS(entropy::validate_interval(crossed, rho, 2, 2));
}
