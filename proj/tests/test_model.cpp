// Model layer: parameter validation, sampling pair, deformed pair,
// coefficient windows, continued fractions, resonance scan.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "qwlab/model.hpp"

using namespace qwlab;

TEST_CASE("parameter validation and derived constants") {
  CHECK_THROWS_AS(WalkParameters::make(0.0, 0.5, 0.5, golden_mean(), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(WalkParameters::make(0.5, 1.0, 0.5, golden_mean(), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(WalkParameters::make(0.5, 0.5, 1.0, golden_mean(), 0.0),
                  std::invalid_argument);

  WalkParameters p = WalkParameters::make(0.6, 0.8, 0.5, golden_mean(), 0.1);
  CHECK(p.lambda1p == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(p.lambda2p == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(p.k == doctest::Approx(-1.25).epsilon(1e-15));
  CHECK(p.threshold == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(p.coin_singular_possible());
  CHECK_FALSE(WalkParameters::make(0.6, 0.55, 0.5, golden_mean(), 0.1)
                  .coin_singular_possible());
}

TEST_CASE("sampling pair values on the real torus") {
  // decoupled coin: f is the constant lambda2'
  WalkParameters p0 = WalkParameters::make(0.5, 0.8, 0.0, golden_mean(), 0.0);
  CHECK(std::abs(sample_f(p0, {0.3, 0.0}) - cplx(0.6, 0.0)) < 1e-15);
  CHECK(std::abs(sample_f(p0, {0.71, 0.0}) - cplx(0.6, 0.0)) < 1e-15);

  // hand value of f(0) at t = 0.5, lambda2 = 0.5:
  // (2 * 0.25 + (0.25 - 1) sqrt(0.75)) / (-1.25)
  WalkParameters p = WalkParameters::make(0.5, 0.5, 0.5, golden_mean(), 0.0);
  CHECK(std::abs(sample_f(p, {0.0, 0.0}) - cplx(0.1196152422706632, 0.0)) <
        1e-15);

  // f is a real cosine polynomial on the real torus
  for (double x : {0.0, 0.137, 0.42, 0.9}) {
    CHECK(std::abs(sample_f(p, {x, 0.0}).imag()) < 1e-15);
  }

  // g at t = 0 is the pure rotation -lambda2 e^{-2 pi i x}
  CHECK(std::abs(sample_g(p0, {0.25, 0.0}) - cplx(0.0, 0.8)) < 1e-15);

  // pointwise normalization and periodicity
  for (double x : {0.05, 0.3, 0.61, 0.88}) {
    cplx f = sample_f(p, {x, 0.0}), g = sample_g(p, {x, 0.0});
    CHECK(std::abs(std::norm(f) + std::norm(g) - 1.0) < 1e-12);
    CHECK(std::abs(sample_f(p, {x + 1.0, 0.0}) - f) < 1e-13);
    CHECK(std::abs(sample_g(p, {x + 1.0, 0.0}) - g) < 1e-13);
  }

  // off the real axis the conjugate partner continues conj(g)
  ComplexPhasePoint w{0.2, 0.03};
  cplx gs = sample_g_star(p, w);
  cplx g_reflected = std::conj(sample_g(p, {w.x, -w.eps}));
  CHECK(std::abs(gs - g_reflected) < 1e-14);
}

TEST_CASE("deformed pair reduces to the sampling pair at r = t squared") {
  WalkParameters p = WalkParameters::make(0.5, 0.7, 0.5, golden_mean(), 0.0);
  const double r0 = 0.25;
  for (double x : {0.0, 0.17, 0.52, 0.81}) {
    CHECK(std::abs(sample_f_r(p, r0, {x, 0.0}) - sample_f(p, {x, 0.0})) <
          1e-14);
    CHECK(std::abs(sample_g_r(p, r0, {x, 0.0}) - sample_g(p, {x, 0.0})) <
          1e-14);
  }

  // normalization holds along the whole deformation
  for (double r : {0.1, 0.2, 0.4}) {
    for (double x : {0.08, 0.33, 0.67}) {
      cplx f = sample_f_r(p, r, {x, 0.0}), g = sample_g_r(p, r, {x, 0.0});
      CHECK(std::abs(std::norm(f) + std::norm(g) - 1.0) < 1e-12);
    }
  }

  // independent trig-form evaluation of the same display
  const double r = 0.2, t = 0.5, l2 = 0.7, l2p = p.lambda2p;
  const double kr = -perturbed_norm(p, r);
  for (double x : {0.0, 0.23, 0.59}) {
    double c = std::cos(2 * kPi * x), s = std::sin(2 * kPi * x);
    cplx f_trig = ((r / t + t) * l2 * c + (r - 1.0) * l2p +
                   cplx(0, 1) * (r / t - t) * l2 * s) /
                  kr;
    CHECK(std::abs(sample_f_r(p, r, {x, 0.0}) - f_trig) < 1e-14);
  }

  // the deformation divides by t, so t = 0 is rejected
  WalkParameters pz = WalkParameters::make(0.5, 0.7, 0.0, golden_mean(), 0.0);
  CHECK_THROWS_AS(sample_f_r(pz, 0.2, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(sample_g_r(pz, 0.2, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("coefficient windows carry the two alternating pairs") {
  WalkParameters p = WalkParameters::make(0.6, 0.8, 0.0, golden_mean(), 0.31);
  CoefficientSequence seq = generate_coefficients(p, {-21, 20});

  // every even index holds the constant shift pair
  for (long j = -20; j <= 20; j += 2) {
    CHECK(std::abs(seq.alpha(j) - cplx(0.8, 0.0)) < 1e-15);
    CHECK(std::abs(seq.rho(j) - cplx(0.6, 0.0)) < 1e-15);
  }
  // normalization on the whole window
  for (long j = -21; j <= 20; ++j) {
    CHECK(std::abs(std::norm(seq.alpha(j)) + std::norm(seq.rho(j)) - 1.0) <
          1e-12);
  }

  // shifting theta by phi advances the coin index by one site
  WalkParameters ps =
      WalkParameters::make(0.6, 0.8, 0.0, golden_mean(), 0.31 + golden_mean());
  CoefficientSequence shifted = generate_coefficients(ps, {-21, 20});
  for (long n = -8; n <= 8; ++n) {
    CHECK(std::abs(shifted.alpha(2 * n - 1) - seq.alpha(2 * (n + 1) - 1)) <
          1e-12);
  }
}

TEST_CASE("continued fractions of the standard frequencies") {
  ContinuedFractionData golden = continued_fraction(golden_mean(), 12);
  for (long long a : golden.partial_quotients) CHECK(a == 1);
  // denominators of 1/1, 1/2, 2/3, 3/5, 5/8, 8/13
  REQUIRE(golden.convergent_denoms.size() >= 6);
  CHECK(golden.convergent_denoms[0] == 1);
  CHECK(golden.convergent_denoms[1] == 2);
  CHECK(golden.convergent_denoms[2] == 3);
  CHECK(golden.convergent_denoms[3] == 5);
  CHECK(golden.convergent_denoms[4] == 8);
  CHECK(golden.convergent_denoms[5] == 13);
  // convergents reconstruct the frequency
  size_t last = golden.convergent_denoms.size() - 1;
  CHECK(std::abs(static_cast<double>(golden.convergent_numers[last]) /
                     golden.convergent_denoms[last] -
                 golden_mean()) < 1e-4);
  // exponent estimate for the golden mean: 1 + log 3 / log 2
  CHECK(golden.tau() ==
        doctest::Approx(1.0 + std::log(3.0) / std::log(2.0)).epsilon(1e-12));

  // 1/2 terminates after a single quotient
  ContinuedFractionData half = continued_fraction(0.5, 12);
  REQUIRE(half.convergent_denoms.size() == 1);
  CHECK(half.partial_quotients == std::vector<long long>{2});
  CHECK(half.convergent_denoms[0] == 2);
  CHECK(half.convergent_numers[0] == 1);

  ContinuedFractionData silver = continued_fraction(std::sqrt(2.0) - 1.0, 10);
  for (long long a : silver.partial_quotients) CHECK(a == 2);
}

TEST_CASE("resonance scan flags near-degenerate phases") {
  ContinuedFractionData cf = continued_fraction(golden_mean(), 40);

  // n = 0 is excluded, so theta = 0 itself is clean at short range
  ResonanceReport at_zero = resonance_test(cf, 0.0, 2);
  CHECK_FALSE(at_zero.is_resonant_up_to_N);
  for (double n : at_zero.witnesses) CHECK(n != 0.0);

  // 2 theta + phi integer puts an exact sine zero at n = 1/2
  double theta_res = 0.5 - 0.5 * golden_mean();
  ResonanceReport exact = resonance_test(cf, theta_res, 2);
  CHECK(exact.is_resonant_up_to_N);
  bool has_half = false;
  for (double n : exact.witnesses) has_half = has_half || n == 0.5;
  CHECK(has_half);

  // the stretched-exponential envelope is wide at small |n|, so a long scan
  // flags a few generic hits; the witness set stays sparse (well under 1 %)
  ResonanceReport generic = resonance_test(cf, 0.237, 10000);
  CHECK(generic.is_resonant_up_to_N);
  CHECK(generic.witnesses.size() < 400);

  CHECK_THROWS_AS(resonance_test(cf, 0.1, 0), std::invalid_argument);
}
