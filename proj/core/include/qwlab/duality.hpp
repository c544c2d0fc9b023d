// duality.hpp: the phase-space transform exchanging lambda1 and lambda2,
// its quadrature inverse, and the finite-size residual check that the
// transform intertwines the walk with the transposed dual walk.
#pragma once

#include <vector>

#include "qwlab/gecmv.hpp"

namespace qwlab {

// mixing constants a = 1/sqrt(1+t^2), b = t/sqrt(1+t^2); the matrix
// [[a, b], [b, -a]] is a symmetric involution
struct MixingConstants {
  double a = 1.0;
  double b = 0.0;
};
MixingConstants mixing_constants(const WalkParameters& p);

// phi_n = e^{2 pi i n theta} [[a,b],[b,-a]] (F psi^+, F psi^-)(xi + n phi)
// where (F psi)(x) is the finite Fourier sum over the window; the result
// lives on the same window as psi
StateVector dual_transform(const StateVector& psi, const WalkParameters& p,
                           double xi);

// reads the dual family back through the conjugate kernel averaged over an
// n_xi-point grid; reproduces psi exactly (up to roundoff) whenever the
// support span of psi is at most n_xi sites
StateVector dual_round_trip(const StateVector& psi, const WalkParameters& p,
                            int n_xi = 32, double grid_offset = 0.37);

// grid-averaged (1/(n_xi |window|)) sum of ||phi^xi||^2 over the same grid;
// equals ||psi||^2 exactly under the same support condition
double parseval_mass(const StateVector& psi, const WalkParameters& p,
                     int n_xi = 32, double grid_offset = 0.37);

// residual summary for one source eigenpair against the dual walk
struct DualityPairReport {
  cplx eigenvalue;
  double source_residual = 0.0;   // ||(E - z) v|| on the source truncation
  double interior_mass = 0.0;     // fraction of ||phi||^2 on the middle half
  bool low_interior_mass = false; // interior mass under 10%, flagged
  std::vector<double> residuals;  // one relative residual per kept xi
  double median_residual = 0.0;
  double max_residual = 0.0;
};

struct DualityReport {
  std::vector<DualityPairReport> pairs;
  double median_residual = 0.0;  // pooled over all pairs and xi
  double max_residual = 0.0;
  int excluded_xi = 0;           // grid points dropped near resonant phases
  int n_xi = 0;
};

// draws the n_eigpairs most interior-concentrated eigenpairs of the closed
// truncation (truncation_size CMV indices, >= 64) and measures the relative
// residual of the transposed dual walk on the interior half-window, per xi
// on a 32-point grid with resonant phases excluded
DualityReport duality_residual(const WalkParameters& p, long truncation_size,
                               int n_eigpairs, int n_xi = 32);

}  // namespace qwlab
