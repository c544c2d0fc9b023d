// Dynamics layer: exact evolution in the light cone, moment growth, and the
// spreading exponents of the three regimes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qwlab/dynamics.hpp"

using namespace qwlab;

TEST_CASE("evolution basics") {
  WalkParameters p = WalkParameters::make(0.5, 0.5, 0.5, golden_mean(), 0.137);

  SUBCASE("zero steps is the identity") {
    StateVector psi = initial_state(InitialSpinor::symmetric, -8, 7);
    StateVector out = evolve(p, 0, psi);
    REQUIRE(out.nmin == psi.nmin);
    for (long i = 0; i < psi.size(); ++i) {
      CHECK(out.plus[i] == psi.plus[i]);
      CHECK(out.minus[i] == psi.minus[i]);
    }
  }

  SUBCASE("negative time and tight windows throw") {
    StateVector psi = initial_state(InitialSpinor::up, -8, 7);
    CHECK_THROWS_AS(evolve(p, -1, psi), std::invalid_argument);
    CHECK_THROWS_AS(evolve(p, 16, psi), std::invalid_argument);
  }

  SUBCASE("norm is preserved over long runs") {
    StateVector psi = initial_state(InitialSpinor::up, -4100, 4100);
    StateVector out = evolve(p, 4096, psi);
    CHECK(std::abs(out.norm() - 1.0) <= 1e-10);
  }

  SUBCASE("support stays inside the light cone") {
    StateVector psi = initial_state(InitialSpinor::symmetric, -70, 69);
    StateVector out = evolve(p, 64, psi);
    for (long n = out.nmin; n <= out.nmax(); ++n) {
      if (std::abs(n) > 64) {
        CHECK(std::abs(out.plus[n - out.nmin]) == 0.0);
        CHECK(std::abs(out.minus[n - out.nmin]) == 0.0);
      }
    }
  }
}

TEST_CASE("second moment respects the ballistic bound") {
  WalkParameters p = WalkParameters::make(0.5, 0.8, 0.8, golden_mean(), 0.137);
  TransportRecord rec = transport(p, 256, 20);
  REQUIRE(rec.times.back() == 256);
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    double T = static_cast<double>(rec.times[i]);
    CHECK(rec.second_moment[i] <= T * T + 1e-9);
  }
  CHECK(rec.norm_drift <= 1e-10);
}

TEST_CASE("nearly free walk moves at speed close to one") {
  // lambda1 near 1 and a nearly transparent coin: the front reaches almost
  // the full light cone and most of the mass travels with it
  WalkParameters p =
      WalkParameters::make(0.999, 1e-6, 0.0, golden_mean(), 0.137);
  StateVector psi = initial_state(InitialSpinor::symmetric, -270, 269);
  StateVector out = evolve(p, 256, psi);
  double far = 0.0;
  for (long n = out.nmin; n <= out.nmax(); ++n) {
    if (std::abs(n) > 230) {
      far += std::norm(out.plus[n - out.nmin]);
      far += std::norm(out.minus[n - out.nmin]);
    }
  }
  CHECK(far > 0.3);
}

TEST_CASE("spreading exponents separate the regimes") {
  // pure point region: the packet stalls
  WalkParameters loc = WalkParameters::make(0.3, 0.7, 0.0, golden_mean(), 0.137);
  TransportRecord rl = transport(loc, 4096);
  CHECK(rl.fitted_exponent < 0.25);
  CHECK(rl.norm_drift <= 1e-10);

  // absolutely continuous region: near-ballistic growth
  WalkParameters bal = WalkParameters::make(0.7, 0.3, 0.0, golden_mean(), 0.137);
  TransportRecord rb = transport(bal, 4096);
  CHECK(rb.fitted_exponent > 0.8);
  CHECK(rb.norm_drift <= 1e-10);
}
