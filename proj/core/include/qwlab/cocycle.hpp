// cocycle.hpp: transfer and Szego cocycles over the irrational rotation,
// their complexified variants, iteration with rescaling, and group checks.
#pragma once

#include <Eigen/Dense>

#include "qwlab/model.hpp"

namespace qwlab {

enum class GroupTag { su11, sl2r, general };

struct Cocycle2x2 {
  Eigen::Matrix2cd m;
  GroupTag tag = GroupTag::general;
};

// which 2x2 map is iterated over x -> x + phi
enum class CocycleKind {
  transfer_A,      // walk transfer matrix (singular where f vanishes)
  szego_one_step,  // single Szego step, parity selects shift or coin pair
  szego_two_step,  // normalized product of one even and one odd step
  numerator_D,     // polynomial numerator of the two-step map (entire)
  perturbed,       // deformed two-step normalized by the extended |f_r|
};

struct CocycleMapSpec {
  WalkParameters p;
  cplx z{1.0, 0.0};
  CocycleKind kind = CocycleKind::szego_two_step;
  int parity = 0;   // szego_one_step only: 0 = shift pair, 1 = coin pair
  double r = 0.0;   // perturbed only

  static CocycleMapSpec two_step(const WalkParameters& p, cplx z) {
    return {p, z, CocycleKind::szego_two_step, 0, 0.0};
  }
  static CocycleMapSpec numerator(const WalkParameters& p, cplx z) {
    return {p, z, CocycleKind::numerator_D, 0, 0.0};
  }
};

// walk transfer matrix at phase w; throws SingularSampleError when
// |f| <= 1e-12, and sets a quarantine flag (if given) when |f| <= 1e-6
Cocycle2x2 transfer_A(const WalkParameters& p, cplx z, ComplexPhasePoint w,
                      bool* quarantine = nullptr);

// single Szego step from a coefficient pair (z^{-1/2}/|rho|) [[z, -conj(a)],
// [-a z, 1]]; principal branch of the square root with arg in [0, 2 pi)
Cocycle2x2 szego_step(cplx alpha, double rho_abs, cplx z);

// numerator polynomial map of the two-step product
Eigen::Matrix2cd numerator_D(const WalkParameters& p, cplx z,
                             ComplexPhasePoint w);
// deformed numerator (substitutes the r-deformed pair)
Eigen::Matrix2cd numerator_D_r(const WalkParameters& p, double r, cplx z,
                               ComplexPhasePoint w);

// evaluate the map selected by `spec` at w
Cocycle2x2 evaluate(const CocycleMapSpec& spec, ComplexPhasePoint w,
                    bool* quarantine = nullptr);

// n-step product M(x + (n-1)phi) ... M(x), rescaled to unit max-norm every 16
// steps with the scale kept in a log accumulator
struct IterateResult {
  Eigen::Matrix2cd m;      // rescaled product
  double log_scale = 0.0;  // log of the removed scale
  long steps = 0;
  long quarantined = 0;    // steps with |f| <= 1e-6 (evaluated, flagged)
  double log_norm() const {
    return log_scale + std::log(m.norm());
  }
};
IterateResult iterate(const CocycleMapSpec& spec, double x0, double eps,
                      long n_steps);

// conjugate an SU(1,1) cocycle value into SL(2,R); throws if the input tag
// or the J-unitarity residual disqualifies it
Cocycle2x2 to_sl2r(const Cocycle2x2& c);

// derivative of the argument of (conjugated) S_{e^{is}} v along s at the
// given samples; all negative on the critical line
std::vector<double> monotonicity_probe(const WalkParameters& p, double x,
                                       Eigen::Vector2d v,
                                       const std::vector<double>& s_grid);

}  // namespace qwlab
