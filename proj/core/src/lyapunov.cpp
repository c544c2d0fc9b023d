// lyapunov.cpp: Birkhoff averages with rescaling, closed-form exponents,
// Jensen integrals, regime classification.
#include "qwlab/lyapunov.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qwlab {

namespace {

// one Birkhoff orbit; steps on the singular set (|f| <= 1e-6) are skipped
// and counted instead of contaminating the product
struct OrbitResult {
  double le = 0.0;
  long excluded = 0;
};

OrbitResult orbit_le(const CocycleMapSpec& spec, double x0, double eps,
                     long n_steps) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  double log_scale = 0.0;
  long counted = 0, excluded = 0;
  double x = x0;
  for (long j = 0; j < n_steps; ++j) {
    bool quarantined = false;
    Eigen::Matrix2cd step;
    bool usable = true;
    try {
      step = evaluate(spec, {x, eps}, &quarantined).m;
    } catch (const SingularSampleError&) {
      usable = false;
    }
    if (usable && quarantined) usable = false;
    if (usable) {
      m = step * m;
      ++counted;
      if ((counted & 15) == 0) {
        double s = m.cwiseAbs().maxCoeff();
        if (s > 0) {
          log_scale += std::log(s);
          m /= s;
        }
      }
    } else {
      ++excluded;
    }
    x += spec.p.phi;
    if (x >= 1.0) x -= 1.0;
  }
  OrbitResult r;
  r.excluded = excluded;
  if (counted == 0) throw SingularSampleError("all orbit steps excluded");
  r.le = (log_scale + std::log(m.norm())) / counted;
  return r;
}

}  // namespace

LyapunovEstimate estimate_le(const CocycleMapSpec& spec, double eps,
                             const LyapunovBudget& budget) {
  if (budget.n_phases < 1 || budget.n_steps < 16)
    throw std::invalid_argument("lyapunov budget too small");
  SplitMix64 rng(budget.seed);
  std::vector<double> values;
  values.reserve(budget.n_phases);
  long excluded = 0;
  for (int i = 0; i < budget.n_phases; ++i) {
    OrbitResult r = orbit_le(spec, rng.uniform(), eps, budget.n_steps);
    values.push_back(r.le);
    excluded += r.excluded;
  }
  LyapunovEstimate est;
  est.n_steps = budget.n_steps;
  est.n_phases = budget.n_phases;
  est.eps = eps;
  est.excluded_steps = excluded;
  double mean = 0;
  for (double v : values) mean += v;
  mean /= values.size();
  double var = 0;
  for (double v : values) var += (v - mean) * (v - mean);
  var = (values.size() > 1) ? var / (values.size() - 1) : 0.0;
  est.value = mean;
  est.std_error = std::sqrt(var / values.size());
  est.noisy = est.std_error > 0.05 * std::max(std::abs(est.value), 0.01);
  return est;
}

AccelerationEstimate estimate_acceleration(const CocycleMapSpec& spec,
                                           double eps_center, double eps_step,
                                           const LyapunovBudget& budget) {
  if (!(eps_step >= 1e-3 && eps_step <= 5e-2))
    throw std::invalid_argument("eps_step outside [1e-3, 5e-2]");
  LyapunovEstimate hi = estimate_le(spec, eps_center + eps_step, budget);
  LyapunovEstimate lo = estimate_le(spec, eps_center - eps_step, budget);
  AccelerationEstimate a;
  a.eps_center = eps_center;
  a.eps_step = eps_step;
  a.omega = (hi.value - lo.value) / (4.0 * kPi * eps_step);
  a.residual_to_int = std::abs(a.omega - std::round(a.omega));
  return a;
}

// ---- closed forms ----

namespace {

// radical sqrt((1+t^2)^2 lambda'^2 - 4 t^2), real only below threshold
double channel_radical(double t, double lambdap) {
  double v = (1 + t * t) * (1 + t * t) * lambdap * lambdap - 4 * t * t;
  if (v < 0)
    throw std::domain_error(
        "radicand negative: coupling is at or above the threshold");
  return std::sqrt(v);
}

double channel_value(double t, double lambdap) {
  return std::abs(1 - t * t) * lambdap + channel_radical(t, lambdap);
}

}  // namespace

double closed_form_F(const WalkParameters& p) {
  if (p.t == 0.0) return closed_form_t0(p);
  if (p.lambda1 >= p.threshold || p.lambda2 >= p.threshold)
    throw std::domain_error("closed form F needs both couplings below "
                            "threshold");
  double num = p.lambda2 * channel_value(p.t, p.lambda1p);
  double den = p.lambda1 * channel_value(p.t, p.lambda2p);
  return std::log(num / den);
}

double closed_form_singular(const WalkParameters& p) {
  if (p.t == 0.0)
    throw std::domain_error("singular closed form undefined at t = 0");
  if (p.lambda2 < p.threshold)
    throw std::domain_error("singular closed form needs lambda2 >= threshold");
  if (p.lambda1 >= p.threshold) return 0.0;
  return std::log(channel_value(p.t, p.lambda1p) /
                  (2 * std::abs(p.t) * p.lambda1));
}

double closed_form_t0(const WalkParameters& p) {
  if (p.t != 0.0) throw std::domain_error("t0 closed form needs t = 0");
  return std::max(
      std::log((p.lambda1p * p.lambda2) / (p.lambda1 * p.lambda2p)), 0.0);
}

double closed_form_le(const WalkParameters& p) {
  if (p.t == 0.0) return closed_form_t0(p);
  if (p.lambda2 >= p.threshold) return closed_form_singular(p);
  if (p.lambda1 >= p.threshold) return 0.0;  // subcritical by dominance
  return std::max(closed_form_F(p), 0.0);
}

// ---- Jensen integrals ----

double jensen_strip_halfwidth(const WalkParameters& p) {
  if (p.t == 0.0) return std::numeric_limits<double>::infinity();
  if (p.lambda2 >= p.threshold) return 0.0;
  return std::log(channel_value(p.t, p.lambda2p) /
                  (2 * std::abs(p.t) * p.lambda2)) /
         (2 * kPi);
}

double jensen_strip_halfwidth_r(const WalkParameters& p, double r) {
  if (p.t == 0.0)
    throw std::domain_error("deformed strip undefined at t = 0");
  return std::log(std::sqrt(std::abs(r)) / std::abs(p.t)) / (2 * kPi);
}

double jensen_closed_form(const WalkParameters& p, double eps) {
  if (p.t == 0.0) return std::log(p.lambda2p);
  if (p.lambda2 < p.threshold) {
    if (std::abs(eps) > jensen_strip_halfwidth(p))
      throw std::domain_error("eps outside the zero-free strip");
    return std::log(0.5 * channel_value(p.t, p.lambda2p)) +
           std::log(-1.0 / p.k);
  }
  return std::log(std::abs(p.t) * p.lambda2) + std::log(-1.0 / p.k) +
         2 * kPi * std::abs(eps);
}

JensenResult jensen_integral_f(const WalkParameters& p, double eps,
                               int grid_log2) {
  const long n = 1L << grid_log2;
  double acc = 0.0;
  for (long i = 0; i < n; ++i) {
    double x = static_cast<double>(i) / n;
    acc += std::log(std::abs(sample_f(p, {x, eps})));
  }
  JensenResult res;
  res.quadrature = acc / n;
  res.closed_form = jensen_closed_form(p, eps);
  res.abs_diff = std::abs(res.quadrature - res.closed_form);
  return res;
}

JensenResult jensen_integral_fr_ext(const WalkParameters& p, double r,
                                    double eps, int grid_log2) {
  const long n = 1L << grid_log2;
  double acc = 0.0;
  double prev_arg = 0.0;
  for (long i = 0; i < n; ++i) {
    double x = static_cast<double>(i) / n;
    cplx prod = sample_f_r(p, r, {x, eps}) * sample_f_r_swap(p, r, {x, eps});
    double a = std::arg(prod);
    if (i > 0) {
      double jump = a - prev_arg;
      while (jump > kPi) jump -= 2 * kPi;
      while (jump < -kPi) jump += 2 * kPi;
      if (std::abs(jump) > 0.5 * kPi)
        throw std::runtime_error(
            "branch tracking failed: integrand phase jump exceeds pi/2");
    }
    prev_arg = a;
    acc += 0.5 * std::log(std::abs(prod));
  }
  JensenResult res;
  res.quadrature = acc / n;
  double eps0 = jensen_strip_halfwidth_r(p, r);
  double log_kr = std::log(perturbed_norm(p, r));
  if (eps0 < 0.0) {
    if (std::abs(eps) > -eps0)
      throw std::domain_error("eps outside the deformed strip");
    res.closed_form = std::log(std::abs(p.t) * p.lambda2) - log_kr;
  } else {
    if (std::abs(eps) > eps0)
      throw std::domain_error("eps outside the deformed strip");
    res.closed_form =
        std::log(std::abs(r / p.t) * p.lambda2) - log_kr;
  }
  res.abs_diff = std::abs(res.quadrature - res.closed_form);
  return res;
}

// ---- classification ----

RegimeReport classify_regime(const WalkParameters& p, cplx z,
                             const ClassifyBudget& budget) {
  RegimeReport rep;
  rep.z = z;
  LyapunovBudget le_budget{budget.le_steps, budget.n_phases, budget.seed};
  LyapunovEstimate le =
      estimate_le(CocycleMapSpec::two_step(p, z), 0.0, le_budget);
  rep.le = le.value;
  rep.le_err = le.std_error;

  LyapunovBudget acc_budget{budget.accel_steps, budget.n_phases, budget.seed};
  AccelerationEstimate acc = estimate_acceleration(
      CocycleMapSpec::numerator(p, z), 2 * budget.eps_step, budget.eps_step,
      acc_budget);
  rep.omega = acc.omega;

  double thr = budget.le_threshold;
  bool straddle = std::abs(le.value - thr) < le.std_error;
  if (straddle) {
    rep.regime = Regime::inconclusive;
    rep.predicted = SpectralType::undetermined;
    return rep;
  }
  if (le.value > thr) {
    rep.regime = Regime::supercritical;
    rep.predicted = SpectralType::pure_point;
  } else if (std::lround(acc.omega) >= 1) {
    rep.regime = Regime::critical;
    rep.predicted = SpectralType::singular_continuous;
  } else {
    rep.regime = Regime::subcritical;
    rep.predicted = SpectralType::absolutely_continuous;
  }
  return rep;
}

cplx refine_z_by_le(const WalkParameters& p, cplx z, double arc,
                    const LyapunovBudget& budget) {
  const double base = std::arg(z);
  double best_le = std::numeric_limits<double>::infinity();
  cplx best = std::polar(1.0, base);
  for (int i = 0; i < 9; ++i) {
    const cplx cand = std::polar(1.0, base + arc * (i / 4.0 - 1.0));
    LyapunovEstimate le =
        estimate_le(CocycleMapSpec::two_step(p, cand), 0.0, budget);
    if (le.value < best_le) {
      best_le = le.value;
      best = cand;
    }
  }
  return best;
}

CellReport classify_cell(const WalkParameters& p, const std::vector<cplx>& zs,
                         const ClassifyBudget& budget, double refine_arc) {
  if (zs.empty())
    throw std::invalid_argument("classify_cell needs at least one candidate");
  CellReport rep;
  LyapunovBudget refine_budget{std::max(8000L, budget.le_steps / 25), 2,
                               budget.seed};
  for (cplx z0 : zs) {
    const cplx z = refine_z_by_le(p, z0, refine_arc, refine_budget);
    rep.per_z.push_back(classify_regime(p, z, budget));
  }
  for (std::size_t i = 0; i < rep.per_z.size(); ++i)
    if (rep.per_z[i].le < rep.per_z[rep.argmin].le) rep.argmin = i;
  rep.le_min = rep.per_z[rep.argmin].le;
  rep.omega = rep.per_z[rep.argmin].omega;

  if (rep.le_min > budget.le_threshold) {
    rep.regime = Regime::supercritical;
    rep.predicted = SpectralType::pure_point;
    return rep;
  }
  int ones = 0, zeros = 0;
  for (const RegimeReport& r : rep.per_z) {
    if (r.le > budget.le_threshold) continue;
    (std::lround(r.omega) >= 1 ? ones : zeros) += 1;
  }
  const bool critical =
      ones > zeros || (ones == zeros && std::lround(rep.omega) >= 1);
  rep.regime = critical ? Regime::critical : Regime::subcritical;
  rep.predicted = critical ? SpectralType::singular_continuous
                           : SpectralType::absolutely_continuous;
  return rep;
}

SpectralType predicted_type(const WalkParameters& p) {
  double thr = p.threshold;
  if (p.lambda1 >= thr && p.lambda2 >= thr)
    return SpectralType::singular_continuous;
  if (p.lambda1 == p.lambda2) return SpectralType::singular_continuous;
  if (p.lambda1 < p.lambda2) return SpectralType::pure_point;
  return SpectralType::absolutely_continuous;
}

}  // namespace qwlab
