// cocycle.cpp: cocycle map evaluation, rescaled iteration, group membership,
// phase monotonicity probe.
#include "qwlab/cocycle.hpp"

#include <cmath>

namespace qwlab {

namespace {

// principal square root with the branch cut fixed by arg in [0, 2 pi)
cplx sqrt_principal(cplx z) {
  double a = std::arg(z);
  if (a < 0) a += 2 * kPi;
  return std::polar(std::sqrt(std::abs(z)), 0.5 * a);
}

void singular_guards(double fabs, bool* quarantine) {
  if (fabs <= 1e-12)
    throw SingularSampleError("sampling function vanishes at this phase");
  if (fabs <= 1e-6 && quarantine) *quarantine = true;
}

}  // namespace

Cocycle2x2 transfer_A(const WalkParameters& p, cplx z, ComplexPhasePoint w,
                      bool* quarantine) {
  cplx f = sample_f(p, w);
  singular_guards(std::abs(f), quarantine);
  cplx g = sample_g(p, w);
  cplx gs = sample_g_star(p, w);
  const double l = p.lambda1, lp = p.lambda1p;
  Cocycle2x2 c;
  c.m(0, 0) = (1.0 / z + lp * (g + gs) + lp * lp * z) / (l * f);
  c.m(0, 1) = -(g + lp * z) / f;
  c.m(1, 0) = -(gs + lp * z) / f;
  c.m(1, 1) = l * z / f;
  c.tag = GroupTag::general;
  return c;
}

Cocycle2x2 szego_step(cplx alpha, double rho_abs, cplx z) {
  if (rho_abs <= 1e-12)
    throw SingularSampleError("szego step with vanishing rho");
  Cocycle2x2 c;
  cplx pref = 1.0 / (sqrt_principal(z) * rho_abs);
  c.m(0, 0) = pref * z;
  c.m(0, 1) = -pref * std::conj(alpha);
  c.m(1, 0) = -pref * alpha * z;
  c.m(1, 1) = pref;
  c.tag = (std::abs(std::abs(z) - 1.0) < 1e-12) ? GroupTag::su11
                                                : GroupTag::general;
  return c;
}

Eigen::Matrix2cd numerator_D(const WalkParameters& p, cplx z,
                             ComplexPhasePoint w) {
  cplx g = sample_g(p, w);
  cplx gs = sample_g_star(p, w);
  const double lp = p.lambda1p;
  Eigen::Matrix2cd d;
  d(0, 0) = z * z + lp * z * g;
  d(0, 1) = -gs * z - lp;
  d(1, 0) = -lp * z * z - g * z;
  d(1, 1) = lp * z * gs + 1.0;
  return d;
}

Eigen::Matrix2cd numerator_D_r(const WalkParameters& p, double r, cplx z,
                               ComplexPhasePoint w) {
  cplx g = sample_g_r(p, r, w);
  // swap partner of g_r (the continuation of conj(g_r) off the real axis)
  cplx e = std::polar(std::exp(-2.0 * kPi * w.eps), 2.0 * kPi * w.x);
  cplx ei = 1.0 / e;
  double kr = -perturbed_norm(p, r);
  cplx gs = (-r * p.lambda2 * ei + p.lambda2 * e +
             (p.t + r / p.t) * p.lambda2p) /
            kr;
  const double lp = p.lambda1p;
  Eigen::Matrix2cd d;
  d(0, 0) = z * z + lp * z * g;
  d(0, 1) = -gs * z - lp;
  d(1, 0) = -lp * z * z - g * z;
  d(1, 1) = lp * z * gs + 1.0;
  return d;
}

Cocycle2x2 evaluate(const CocycleMapSpec& spec, ComplexPhasePoint w,
                    bool* quarantine) {
  const WalkParameters& p = spec.p;
  switch (spec.kind) {
    case CocycleKind::transfer_A:
      return transfer_A(p, spec.z, w, quarantine);
    case CocycleKind::szego_one_step: {
      if (w.eps != 0.0)
        throw std::invalid_argument(
            "one-step szego cocycle is defined on the real torus only");
      if (spec.parity == 0) return szego_step(p.lambda1p, p.lambda1, spec.z);
      cplx f = sample_f(p, w), g = sample_g(p, w);
      singular_guards(std::abs(f), quarantine);
      return szego_step(g, std::abs(f), spec.z);
    }
    case CocycleKind::szego_two_step: {
      cplx f = sample_f(p, w);
      // off the real axis |f| extends analytically to f itself only where f
      // is zero-free with constant sign; restrict to that (nonsingular) case
      if (w.eps != 0.0 && p.coin_singular_possible())
        throw std::invalid_argument(
            "complexified two-step cocycle needs a zero-free sampling "
            "function; use the numerator cocycle instead");
      cplx fext = (w.eps == 0.0) ? cplx(std::abs(f), 0.0) : f;
      singular_guards(std::abs(f), quarantine);
      Cocycle2x2 c;
      c.m = numerator_D(p, spec.z, w) / (spec.z * p.lambda1 * fext);
      c.tag = (w.eps == 0.0 && std::abs(std::abs(spec.z) - 1.0) < 1e-12)
                  ? GroupTag::su11
                  : GroupTag::general;
      return c;
    }
    case CocycleKind::numerator_D: {
      Cocycle2x2 c;
      c.m = numerator_D(p, spec.z, w);
      c.tag = GroupTag::general;
      return c;
    }
    case CocycleKind::perturbed: {
      cplx up = sample_f_r(p, spec.r, w);
      cplx dn = sample_f_r_swap(p, spec.r, w);
      cplx fext = sqrt_principal(up * dn);
      singular_guards(std::abs(fext), quarantine);
      Cocycle2x2 c;
      c.m = numerator_D_r(p, spec.r, spec.z, w) /
            (spec.z * p.lambda1 * fext);
      c.tag = GroupTag::general;
      return c;
    }
  }
  throw std::logic_error("unreachable cocycle kind");
}

IterateResult iterate(const CocycleMapSpec& spec, double x0, double eps,
                      long n_steps) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  IterateResult r;
  r.m.setIdentity();
  double x = x0;
  for (long j = 0; j < n_steps; ++j) {
    bool q = false;
    Cocycle2x2 step = evaluate(spec, {x, eps}, &q);
    if (q) ++r.quarantined;
    r.m = step.m * r.m;
    if ((j & 15) == 15) {
      double s = r.m.cwiseAbs().maxCoeff();
      if (s > 0) {
        r.log_scale += std::log(s);
        r.m /= s;
      }
    }
    x += spec.p.phi;
    if (x >= 1.0) x -= 1.0;
  }
  r.steps = n_steps;
  return r;
}

Cocycle2x2 to_sl2r(const Cocycle2x2& c) {
  if (c.tag != GroupTag::su11)
    throw std::invalid_argument("to_sl2r needs an su11-tagged cocycle value");
  Eigen::Matrix2cd eta;
  eta << 1, 0, 0, -1;
  double det_err = std::abs(std::abs(c.m.determinant()) - 1.0);
  double j_err = (c.m.adjoint() * eta * c.m - eta).cwiseAbs().maxCoeff();
  if (det_err > 1e-10 || j_err > 1e-9)
    throw std::invalid_argument("matrix fails the su11 membership residuals");
  Eigen::Matrix2cd P, Pa;
  const cplx i(0, 1);
  P << 1, i, i, 1;
  P /= std::sqrt(2.0);
  Pa = P.adjoint();
  Cocycle2x2 out;
  out.m = P * c.m * Pa;
  // strip the residual imaginary dust so downstream code can trust realness
  double imag_max = out.m.imag().cwiseAbs().maxCoeff();
  if (imag_max > 1e-8)
    throw std::invalid_argument("conjugated matrix is not real");
  out.m = out.m.real().cast<cplx>();
  out.tag = GroupTag::sl2r;
  return out;
}

std::vector<double> monotonicity_probe(const WalkParameters& p, double x,
                                       Eigen::Vector2d v,
                                       const std::vector<double>& s_grid) {
  if (v.norm() == 0) throw std::invalid_argument("zero probe vector");
  std::vector<double> out;
  out.reserve(s_grid.size());
  const double h = 1e-6;
  auto arg_at = [&](double s) {
    CocycleMapSpec spec = CocycleMapSpec::two_step(p, std::polar(1.0, s));
    Cocycle2x2 val = evaluate(spec, {x, 0.0});
    Cocycle2x2 real = to_sl2r(val);
    Eigen::Vector2d y = real.m.real() * v;
    return std::atan2(y[1], y[0]);
  };
  for (double s : s_grid) {
    double a1 = arg_at(s - h), a2 = arg_at(s + h);
    double d = a2 - a1;
    while (d > kPi) d -= 2 * kPi;
    while (d < -kPi) d += 2 * kPi;
    out.push_back(d / (2 * h));
  }
  return out;
}

}  // namespace qwlab
