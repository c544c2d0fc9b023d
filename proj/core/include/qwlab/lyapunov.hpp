// lyapunov.hpp: Birkhoff Lyapunov estimates, acceleration readings, closed
// forms for the exponent, Jensen-type integrals, regime classification.
#pragma once

#include <optional>

#include "qwlab/cocycle.hpp"

namespace qwlab {

struct LyapunovEstimate {
  double value = 0.0;      // exponent per map application
  double std_error = 0.0;  // phase-to-phase spread / sqrt(n_phases)
  long n_steps = 0;
  int n_phases = 0;
  double eps = 0.0;
  long excluded_steps = 0;  // singular-set exclusions (|f| < 1e-6)
  bool noisy = false;       // std_error > 0.05 * max(|value|, 0.01)
};

struct LyapunovBudget {
  long n_steps = 200000;
  int n_phases = 8;
  std::uint64_t seed = 0x5eed;
};

LyapunovEstimate estimate_le(const CocycleMapSpec& spec, double eps,
                             const LyapunovBudget& budget);

// finite-difference acceleration (L(c + s) - L(c - s)) / (4 pi s); centered
// at c = 2 s by default so both evaluations sit off the eps = 0 kink
struct AccelerationEstimate {
  double omega = 0.0;
  double eps_center = 0.0;
  double eps_step = 0.0;
  double residual_to_int = 0.0;  // |omega - round(omega)|
};

AccelerationEstimate estimate_acceleration(const CocycleMapSpec& spec,
                                           double eps_center, double eps_step,
                                           const LyapunovBudget& budget);

// ---- closed forms ----

// exponent difference F of the two coupling channels (needs lambda1 and
// lambda2 strictly below threshold and t != 0)
double closed_form_F(const WalkParameters& p);
// exponent in the singular-coin region (lambda2 >= threshold, t != 0)
double closed_form_singular(const WalkParameters& p);
// decoupled-coin exponent at t = 0
double closed_form_t0(const WalkParameters& p);
// dispatcher covering the whole parameter square
double closed_form_le(const WalkParameters& p);

// ---- Jensen-type torus integrals ----

// strip half-width for the unperturbed sampling function
double jensen_strip_halfwidth(const WalkParameters& p);
// strip half-width for the r-deformed pair: log(sqrt|r|/|t|) / (2 pi)
double jensen_strip_halfwidth_r(const WalkParameters& p, double r);

struct JensenResult {
  double quadrature = 0.0;
  double closed_form = 0.0;
  double abs_diff = 0.0;
};

// closed form of the torus integral of log|f(x + i eps)| (the quadrature-free
// half of jensen_integral_f)
double jensen_closed_form(const WalkParameters& p, double eps);

// integral of log|f(x + i eps)| over the torus vs its closed form; trapezoid
// on 2^14 points (exponentially accurate for the analytic integrand)
JensenResult jensen_integral_f(const WalkParameters& p, double eps,
                               int grid_log2 = 14);
// integral of the extended log|f_r| (half log-modulus of the swap product),
// with a branch-continuity guard on the product's phase along the grid
JensenResult jensen_integral_fr_ext(const WalkParameters& p, double r,
                                    double eps, int grid_log2 = 14);

// ---- classification ----

enum class Regime { supercritical, critical, subcritical, inconclusive };
enum class SpectralType { pure_point, singular_continuous,
                          absolutely_continuous, undetermined };

struct RegimeReport {
  cplx z;
  double le = 0.0;
  double le_err = 0.0;
  double omega = 0.0;
  Regime regime = Regime::inconclusive;
  SpectralType predicted = SpectralType::undetermined;
};

struct ClassifyBudget {
  long le_steps = 200000;
  long accel_steps = 50000;
  int n_phases = 4;
  double le_threshold = 0.02;
  double eps_step = 0.005;
  std::uint64_t seed = 0x5eed;
};

// numeric classification at one spectral point: exponent of the normalized
// two-step cocycle plus acceleration of the numerator cocycle
RegimeReport classify_regime(const WalkParameters& p, cplx z,
                             const ClassifyBudget& budget);

// slides z along a small arc (9 points over [-arc, arc]) keeping the
// argument with the smallest short-run exponent; rescues candidates that
// landed just off the spectrum
cplx refine_z_by_le(const WalkParameters& p, cplx z, double arc,
                    const LyapunovBudget& budget);

// cell verdict from several z candidates: the exponent is the minimum over
// candidates (gap points only ever raise it) and the acceleration vote is
// taken among candidates at that floor
struct CellReport {
  std::vector<RegimeReport> per_z;
  std::size_t argmin = 0;  // candidate with the smallest exponent
  double le_min = 0.0;
  double omega = 0.0;      // acceleration of the argmin candidate
  Regime regime = Regime::inconclusive;
  SpectralType predicted = SpectralType::undetermined;
};

CellReport classify_cell(const WalkParameters& p, const std::vector<cplx>& zs,
                         const ClassifyBudget& budget,
                         double refine_arc = 0.05);

// phase-diagram prediction for the parameter cell (no numerics)
SpectralType predicted_type(const WalkParameters& p);

}  // namespace qwlab
