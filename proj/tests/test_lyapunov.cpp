// Lyapunov layer: Birkhoff estimates against closed forms, acceleration
// readings, Jensen integrals, regime classification.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qwlab/lyapunov.hpp"
#include "qwlab/spectrum.hpp"

using namespace qwlab;

namespace {

// smallest exponent over refined spectral picks, the standard reading at a
// parameter point
double spectral_le(const WalkParameters& p, long size, long steps) {
  SelectOptions so;
  so.size = size;
  auto sel = select_spectral_z(p, so);
  REQUIRE_FALSE(sel.picks.empty());
  LyapunovBudget refine{8000, 2, 0x5eed};
  LyapunovBudget budget{steps, 8, 0x5eed};
  double best = 1e9;
  for (cplx z : sel.picks) {
    cplx zr = refine_z_by_le(p, z, 0.05, refine);
    best = std::min(best,
                    estimate_le(CocycleMapSpec::two_step(p, zr), 0.0, budget)
                        .value);
  }
  return best;
}

}  // namespace

TEST_CASE("constant cocycle exponent is exact") {
  // the shift-pair one-step map at z = 1 is a constant matrix with
  // eigenvalues (1 +- lambda1')/lambda1; lambda1 = 0.8 gives exactly (2, 1/2)
  WalkParameters p = WalkParameters::make(0.8, 0.5, 0.0, golden_mean(), 0.0);
  CocycleMapSpec spec{p, 1.0, CocycleKind::szego_one_step, 0, 0.0};
  LyapunovEstimate le = estimate_le(spec, 0.0, LyapunovBudget{50000, 4, 1});
  CHECK(std::abs(le.value - std::log(2.0)) < 1e-6);
  CHECK_FALSE(le.noisy);
}

TEST_CASE("decoupled-coin exponent matches the closed form on the spectrum") {
  WalkParameters p = WalkParameters::make(0.3, 0.7, 0.0, golden_mean(), 0.137);
  double le = spectral_le(p, 256, 100000);
  // closed form ln(lambda1' lambda2 / (lambda1 lambda2'))
  CHECK(closed_form_t0(p) ==
        doctest::Approx(1.1368147972834657).epsilon(1e-12));
  CHECK(std::abs(le - closed_form_le(p)) < 2e-2);
}

TEST_CASE("critical line exponent vanishes") {
  WalkParameters p = WalkParameters::make(0.8, 0.8, 0.5, golden_mean(), 0.137);
  CHECK(spectral_le(p, 256, 100000) <= 3e-2);
}

TEST_CASE("singular-region exponent matches its closed form") {
  WalkParameters p = WalkParameters::make(0.3, 0.8, 0.5, golden_mean(), 0.137);
  SelectOptions so;
  so.size = 256;
  auto sel = select_spectral_z(p, so);
  REQUIRE_FALSE(sel.picks.empty());
  LyapunovBudget budget{100000, 8, 0x5eed};
  double best = 1e9;
  const double closed = closed_form_le(p);
  for (cplx z : sel.picks) {
    auto le = estimate_le(CocycleMapSpec::two_step(p, z), 0.0, budget);
    best = std::min(best, std::abs(le.value - closed));
  }
  CHECK(best < 5e-2);
}

TEST_CASE("closed form exponent difference") {
  WalkParameters sym = WalkParameters::make(0.4, 0.4, 0.5, golden_mean(), 0.0);
  CHECK(std::abs(closed_form_F(sym)) < 1e-14);

  WalkParameters ab = WalkParameters::make(0.2, 0.5, 0.5, golden_mean(), 0.0);
  WalkParameters ba = WalkParameters::make(0.5, 0.2, 0.5, golden_mean(), 0.0);
  CHECK(closed_form_F(ab) == doctest::Approx(-closed_form_F(ba)).epsilon(1e-13));
  // hand value of F at t = 0.5, lambda1 = 0.2, lambda2 = 0.5
  CHECK(closed_form_F(ab) ==
        doctest::Approx(1.2201629701506211).epsilon(1e-12));
}

TEST_CASE("closed form in the singular region") {
  // at lambda1 = threshold the radicand closes and the value is ln 1 = 0
  WalkParameters at = WalkParameters::make(0.6, 0.8, 0.5, golden_mean(), 0.0);
  CHECK(std::abs(closed_form_singular(at)) < 1e-12);
  WalkParameters above = WalkParameters::make(0.7, 0.8, 0.5, golden_mean(), 0.0);
  CHECK(closed_form_singular(above) == 0.0);
  WalkParameters below = WalkParameters::make(0.3, 0.8, 0.5, golden_mean(), 0.0);
  CHECK(closed_form_singular(below) > 0.0);
  CHECK(closed_form_singular(below) ==
        doctest::Approx(1.5151077850822032).epsilon(1e-12));
}

TEST_CASE("closed form at the decoupled point") {
  WalkParameters sym = WalkParameters::make(0.5, 0.5, 0.0, golden_mean(), 0.0);
  CHECK(std::abs(closed_form_t0(sym)) < 1e-14);
  WalkParameters sup = WalkParameters::make(0.6, 0.8, 0.0, golden_mean(), 0.0);
  // ln(0.8 * 0.8 / (0.6 * 0.6))
  CHECK(closed_form_t0(sup) ==
        doctest::Approx(std::log(0.64 / 0.36)).epsilon(1e-13));
  WalkParameters sub = WalkParameters::make(0.8, 0.6, 0.0, golden_mean(), 0.0);
  CHECK(closed_form_t0(sub) == 0.0);
}

TEST_CASE("acceleration is quantized at the proof values") {
  LyapunovBudget lb{50000, 8, 0x5eed};
  SelectOptions so;
  so.size = 192;

  WalkParameters sub = WalkParameters::make(0.7, 0.3, 0.0, golden_mean(), 0.137);
  cplx zs = select_spectral_z(sub, so).picks.front();
  auto as = estimate_acceleration(CocycleMapSpec::numerator(sub, zs), 0.01,
                                  0.005, lb);
  CHECK(std::abs(as.omega) < 0.1);

  WalkParameters sup = WalkParameters::make(0.3, 0.7, 0.0, golden_mean(), 0.137);
  cplx zp = select_spectral_z(sup, so).picks.front();
  auto ap = estimate_acceleration(CocycleMapSpec::numerator(sup, zp), 0.01,
                                  0.005, lb);
  CHECK(std::abs(ap.omega - 1.0) < 0.1);
  CHECK(ap.residual_to_int == doctest::Approx(std::abs(ap.omega - 1.0)));

  // the one-step map rejects complex phases (its normalization is only
  // meaningful on the real torus), so acceleration cannot be read from it
  WalkParameters pc = WalkParameters::make(0.8, 0.5, 0.0, golden_mean(), 0.0);
  CocycleMapSpec cs{pc, 1.0, CocycleKind::szego_one_step, 0, 0.0};
  CHECK_THROWS(estimate_acceleration(cs, 0.01, 0.005, lb));
}

TEST_CASE("jensen integral against the closed form") {
  // decoupled coin: the integrand is the constant ln lambda2' at every eps
  WalkParameters p0 = WalkParameters::make(0.5, 0.8, 0.0, golden_mean(), 0.0);
  CHECK(jensen_closed_form(p0, 0.0) ==
        doctest::Approx(std::log(0.6)).epsilon(1e-13));
  CHECK(jensen_closed_form(p0, 0.05) ==
        doctest::Approx(std::log(0.6)).epsilon(1e-13));

  WalkParameters p = WalkParameters::make(0.5, 0.3, 0.5, golden_mean(), 0.0);
  double hw = jensen_strip_halfwidth(p);
  CHECK(hw > 0.0);
  // eps-independence inside the strip
  CHECK(std::abs(jensen_closed_form(p, 0.0) -
                 jensen_closed_form(p, 0.5 * hw)) < 1e-12);
  for (double eps : {0.0, 0.25 * hw, 0.5 * hw, -0.5 * hw}) {
    JensenResult j = jensen_integral_f(p, eps);
    CHECK(j.abs_diff < 1e-8);
  }
}

TEST_CASE("deformed jensen integral and continuity at the corner") {
  WalkParameters p = WalkParameters::make(0.5, 0.8, 0.5, golden_mean(), 0.0);

  // quadrature agrees with the closed form away from r = t^2
  JensenResult j0 = jensen_integral_fr_ext(p, 0.23, 0.0);
  CHECK(j0.abs_diff < 1e-7);
  double hw = jensen_strip_halfwidth_r(p, 0.3);
  CHECK(hw > 0.0);
  JensenResult jh = jensen_integral_fr_ext(p, 0.3, 0.5 * hw);
  CHECK(jh.abs_diff < 1e-7);

  // at eps = 0 the extended modulus is the plain one: match a direct
  // trapezoid sum of ln|f_r| on the same dyadic grid
  {
    const int n = 1 << 12;
    double sum = 0;
    for (int i = 0; i < n; ++i)
      sum += std::log(std::abs(sample_f_r(p, 0.3, {double(i) / n, 0.0})));
    JensenResult jr = jensen_integral_fr_ext(p, 0.3, 0.0, 12);
    CHECK(std::abs(jr.quadrature - sum / n) < 1e-10);
  }

  // deviations from the r = t^2 limit shrink monotonically along the sweep
  double limit = jensen_integral_f(p, 0.0).closed_form;
  double prev = 1e9;
  for (double r : {0.35, 0.30, 0.27, 0.26, 0.255}) {
    double dev = std::abs(jensen_integral_fr_ext(p, r, 0.0).quadrature - limit);
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("regime classification at the canonical cells") {
  CHECK(predicted_type(WalkParameters::make(0.8, 0.8, 0.5, golden_mean(), 0.0)) ==
        SpectralType::singular_continuous);
  CHECK(predicted_type(WalkParameters::make(0.3, 0.7, 0.0, golden_mean(), 0.0)) ==
        SpectralType::pure_point);
  CHECK(predicted_type(WalkParameters::make(0.7, 0.3, 0.0, golden_mean(), 0.0)) ==
        SpectralType::absolutely_continuous);

  ClassifyBudget cb;
  cb.le_steps = 20000;
  cb.accel_steps = 10000;
  SelectOptions so;
  so.size = 192;

  struct Cell {
    double l1, l2, t;
    Regime want;
    SpectralType type;
  };
  for (Cell c : {Cell{0.8, 0.8, 0.5, Regime::critical,
                      SpectralType::singular_continuous},
                 Cell{0.3, 0.7, 0.0, Regime::supercritical,
                      SpectralType::pure_point},
                 Cell{0.7, 0.3, 0.0, Regime::subcritical,
                      SpectralType::absolutely_continuous}}) {
    WalkParameters p =
        WalkParameters::make(c.l1, c.l2, c.t, golden_mean(), 0.137);
    auto sel = select_spectral_z(p, so);
    CellReport rep = classify_cell(p, sel.picks, cb);
    CHECK(rep.regime == c.want);
    CHECK(rep.predicted == c.type);
  }
}

TEST_CASE("refinement never raises the short-run exponent") {
  WalkParameters p = WalkParameters::make(0.45, 0.45, 0.5, golden_mean(), 0.137);
  LyapunovBudget lb{8000, 2, 0x5eed};
  cplx z = std::polar(1.0, 1.32);
  cplx zr = refine_z_by_le(p, z, 0.05, lb);
  double le0 = estimate_le(CocycleMapSpec::two_step(p, z), 0.0, lb).value;
  double le1 = estimate_le(CocycleMapSpec::two_step(p, zr), 0.0, lb).value;
  CHECK(le1 <= le0 + 1e-12);
}
