// Operator layer: assembly and truncation, gauge, walk application paths,
// spectra on the unit circle, Hausdorff distance.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "qwlab/spectrum.hpp"

using namespace qwlab;

namespace {

CoefficientSequence random_coefficients(Interval window, std::uint64_t seed,
                                        bool complex_rho) {
  SplitMix64 rng(seed);
  CoefficientSequence seq;
  seq.window = window;
  seq.alphas.resize(window.size());
  seq.rhos.resize(window.size());
  for (long j = window.a; j <= window.b; ++j) {
    double mod = 0.9 * std::sqrt(rng.uniform());
    cplx alpha = std::polar(mod, 2 * kPi * rng.uniform());
    double rho_abs = std::sqrt(1.0 - mod * mod);
    cplx rho = complex_rho ? std::polar(rho_abs, 2 * kPi * rng.uniform())
                           : cplx(rho_abs, 0.0);
    seq.set_alpha(j, alpha);
    seq.set_rho(j, rho);
  }
  return seq;
}

StateVector random_state(long nmin, long nmax, std::uint64_t seed) {
  SplitMix64 rng(seed);
  StateVector psi = StateVector::zeros(nmin, nmax);
  for (long i = 0; i < psi.size(); ++i) {
    psi.plus[i] = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    psi.minus[i] = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
  }
  double n = psi.norm();
  for (long i = 0; i < psi.size(); ++i) {
    psi.plus[i] /= n;
    psi.minus[i] /= n;
  }
  return psi;
}

}  // namespace

TEST_CASE("assembly validates boundaries and coverage") {
  CoefficientSequence seq = random_coefficients({-9, 8}, 17, false);
  CHECK_NOTHROW(assemble(seq, {-8, 7}, Boundary::closed()));
  // beta off the unit circle is rejected
  CHECK_THROWS_AS(assemble(seq, {-8, 7}, Boundary::closed(0.5, 1.0)),
                  std::invalid_argument);
  // coefficients must cover one index beyond each window edge
  CHECK_THROWS_AS(assemble(seq, {-9, 7}, Boundary::closed()),
                  std::invalid_argument);
}

TEST_CASE("free case acts as a bare shift") {
  // all alpha = 0: the operator moves each basis vector to a single target
  CoefficientSequence seq;
  seq.window = {-9, 8};
  seq.alphas.assign(seq.window.size(), cplx(0.0, 0.0));
  seq.rhos.assign(seq.window.size(), cplx(1.0, 0.0));
  auto op = assemble(seq, {-8, 7}, Boundary::closed());
  Eigen::MatrixXcd E = truncate(op);
  Eigen::VectorXcd delta = Eigen::VectorXcd::Zero(E.cols());
  delta(8) = 1.0;  // cmv index 0
  Eigen::VectorXcd image = E * delta;
  int nonzero = 0;
  for (int i = 0; i < image.size(); ++i) {
    if (std::abs(image(i)) > 1e-14) {
      ++nonzero;
      CHECK(std::abs(std::abs(image(i)) - 1.0) < 1e-14);
    }
  }
  CHECK(nonzero == 1);
}

TEST_CASE("closed truncations are unitary") {
  CoefficientSequence seq = random_coefficients({-33, 32}, 23, true);
  auto op = assemble(seq, {-32, 31}, Boundary::closed());
  Eigen::MatrixXcd E = truncate(op);
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(E.rows(), E.cols());
  CHECK((E.adjoint() * E - I).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("interior diagonal entry matches the coefficient product") {
  WalkParameters p = WalkParameters::make(0.6, 0.8, 0.0, golden_mean(), 0.3);
  Interval win{-40, 39};
  auto coeffs = generate_coefficients(p, {win.a - 1, win.b + 1});
  auto op = assemble(coeffs, win, Boundary::closed());
  Eigen::MatrixXcd E = truncate(op);
  // diagonal identity at cmv index 0, and its decoupled-coin closed form
  // lambda1' lambda2 e^{-2 pi i theta}
  cplx e00 = E(0 - win.a, 0 - win.a);
  CHECK(std::abs(e00 - (-std::conj(coeffs.alpha(0)) * coeffs.alpha(-1))) <
        1e-14);
  CHECK(std::abs(e00 - 0.64 * std::polar(1.0, -2 * kPi * 0.3)) < 1e-14);
}

TEST_CASE("nested truncations agree with the interior block") {
  CoefficientSequence seq = random_coefficients({-13, 12}, 5, true);
  auto op = assemble(seq, {-12, 11}, Boundary::open());
  Interval A{-8, 7}, B{-3, 2};
  Eigen::MatrixXcd EA = truncate(op, A);
  Eigen::MatrixXcd EB = truncate(op, B);
  Eigen::MatrixXcd block = EA.block(B.a - A.a, B.a - A.a, B.size(), B.size());
  CHECK((EB - block).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("tiny closed window is exactly unitary") {
  CoefficientSequence seq = random_coefficients({-2, 2}, 29, false);
  auto op = assemble(seq, {0, 1}, Boundary::closed());
  Eigen::MatrixXcd E = truncate(op);
  REQUIRE(E.rows() == 2);
  CHECK((E.adjoint() * E - Eigen::MatrixXcd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-13);
}

TEST_CASE("gauge fixes phases without moving moduli or spectra") {
  // decoupled coin already has positive rho, so the gauge is trivial
  WalkParameters p0 = WalkParameters::make(0.6, 0.55, 0.0, golden_mean(), 0.1);
  auto coeffs0 = generate_coefficients(p0, {-17, 16});
  auto op0 = assemble(coeffs0, {-16, 15}, Boundary::closed());
  auto [ecmv0, phases0] = gauge_to_ecmv(op0);
  for (cplx u : phases0.u) CHECK(std::abs(u - cplx(1.0, 0.0)) < 1e-13);

  // random complex rho: spectra agree after the gauge
  CoefficientSequence seq = random_coefficients({-17, 16}, 31, true);
  auto op = assemble(seq, {-16, 15}, Boundary::closed());
  auto [ecmv, phases] = gauge_to_ecmv(op);
  for (long j = ecmv.coeffs.window.a; j <= ecmv.coeffs.window.b; ++j) {
    CHECK(ecmv.coeffs.rho(j).imag() == 0.0);
    CHECK(ecmv.coeffs.rho(j).real() >= 0.0);
    // compare against the assembled operator (the closed boundary zeroes
    // the rho just outside each edge)
    CHECK(std::abs(std::abs(ecmv.coeffs.rho(j)) -
                   std::abs(op.coeffs.rho(j))) < 1e-13);
  }
  double d = hausdorff_distance(sorted_eigenvalues(truncate(op)),
                                sorted_eigenvalues(truncate(ecmv)));
  CHECK(d < 1e-10);
}

TEST_CASE("walk application preserves norm and matches the factored route") {
  WalkParameters p = WalkParameters::make(0.45, 0.7, 0.5, golden_mean(), 0.137);
  // leave one empty site at each edge so the step's light cone stays inside
  StateVector interior = random_state(-23, 22, 41);
  StateVector psi = StateVector::zeros(-24, 23);
  for (long n = -23; n <= 22; ++n) {
    psi.plus[n - psi.nmin] = interior.plus[n - interior.nmin];
    psi.minus[n - psi.nmin] = interior.minus[n - interior.nmin];
  }
  CoinTable coins = make_coin_table(p, -24, 23);
  StateVector out = walk_apply(p, coins, psi);
  CHECK(std::abs(out.norm() - 1.0) < 1e-12);

  StateVector factored = walk_apply_factored(p, psi);
  REQUIRE(factored.size() == out.size());
  double worst = 0;
  for (long i = 0; i < out.size(); ++i) {
    worst = std::max(worst, std::abs(out.plus[i] - factored.plus[i]));
    worst = std::max(worst, std::abs(out.minus[i] - factored.minus[i]));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("near-identity coin reduces the step to the bare shift") {
  // lambda2 -> 0 sends the coin to the identity, leaving only the shift,
  // which maps delta_0^+ to lambda1 delta_1^+ + lambda1' delta_0^-
  WalkParameters p = WalkParameters::make(0.6, 1e-9, 0.0, golden_mean(), 0.0);
  StateVector psi = StateVector::zeros(-4, 4);
  psi.plus[4] = 1.0;
  CoinTable coins = make_coin_table(p, -4, 4);
  StateVector out = walk_apply(p, coins, psi);
  CHECK(std::abs(out.plus[5] - cplx(0.6, 0.0)) < 1e-8);
  CHECK(std::abs(out.minus[4] - cplx(0.8, 0.0)) < 1e-8);
}

TEST_CASE("walk step rejects support touching the window edge") {
  WalkParameters p = WalkParameters::make(0.5, 0.5, 0.5, golden_mean(), 0.0);
  StateVector psi = StateVector::zeros(-2, 2);
  psi.plus[4] = 1.0;  // site 2, at the right edge
  CoinTable coins = make_coin_table(p, -2, 2);
  CHECK_THROWS_AS(walk_apply(p, coins, psi), std::invalid_argument);
}

TEST_CASE("spectra of closed truncations sit on the unit circle") {
  CoefficientSequence seq = random_coefficients({-33, 32}, 59, true);
  auto op = assemble(seq, {-32, 31}, Boundary::closed());
  std::vector<cplx> ev = finite_volume_spectrum(op);
  REQUIRE(ev.size() == 64);
  for (cplx z : ev) CHECK(std::abs(std::abs(z) - 1.0) < 1e-10);
  // arg-sorted output
  for (size_t i = 1; i < ev.size(); ++i) {
    double a = std::arg(ev[i - 1]), b = std::arg(ev[i]);
    if (a < 0) a += 2 * kPi;
    if (b < 0) b += 2 * kPi;
    CHECK(a <= b + 1e-14);
  }
}

TEST_CASE("hausdorff distance basic values") {
  std::vector<cplx> A{{1.0, 0.0}, {0.0, 1.0}};
  CHECK(hausdorff_distance(A, A) == 0.0);
  std::vector<cplx> one{{1.0, 0.0}}, minus{{-1.0, 0.0}};
  CHECK(hausdorff_distance(one, minus) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("state vector inner product is antilinear in the first slot") {
  StateVector a = StateVector::zeros(0, 3), b = StateVector::zeros(0, 3);
  a.plus[0] = cplx(0.0, 1.0);
  b.plus[0] = cplx(1.0, 0.0);
  CHECK(std::abs(a.inner(b) - cplx(0.0, -1.0)) < 1e-15);
  CHECK(std::abs(b.inner(a) - cplx(0.0, 1.0)) < 1e-15);
}
