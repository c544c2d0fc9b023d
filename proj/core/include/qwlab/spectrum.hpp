// spectrum.hpp: characteristic polynomials by two independent routes,
// finite-volume Green's functions, spectra with stability-filtered point
// selection, and localization diagnostics (evenness, reflection symmetry,
// regularity, node uniformity, growth rates).
#pragma once

#include <vector>

#include "qwlab/gecmv.hpp"

namespace qwlab {

// det(z I - truncation) via dense LU. Intended for |sub| <= 64; larger
// windows throw (conditioning of the dense determinant degrades with size,
// use the product route instead).
ScaledComplex char_poly_direct(const BandedUnitary& op, Interval sub, cplx z);

// same determinant through the ordered product of one-step transfer blocks
// sandwiched between boundary vectors; log-scale ledger keeps the growth
// representable. Empty windows (a > b) give exactly 1. Requires ECMV form
// (all rho real nonnegative; gauge first otherwise).
ScaledComplex char_poly_product(const BandedUnitary& op, Interval sub, cplx z);

struct GreenFrame {
  Interval window;
  cplx z;
  Eigen::MatrixXcd G;  // (z L* - M)^{-1} over the window
};

// dense-inverse route; throws std::runtime_error when z is numerically an
// eigenvalue of the compression (LU pivot ratio below 1e-12)
GreenFrame green_function(const BandedUnitary& op, Interval sub, cplx z);
inline GreenFrame green_function(const BandedUnitary& op, cplx z) {
  return green_function(op, op.window, z);
}

// |G(u, v)| assembled from the minor factorization of the tridiagonal pencil
// z L* - M: one-sided pencil determinants times the hopping product between
// u and v (Cramer route); same window conventions as above
double green_abs_cramer(const BandedUnitary& op, Interval sub, cplx z, long u,
                        long v);

// residual of the edge-source representation of an interior eigenvector:
// psi solves (big - z) psi = 0 on op's window, sub lies strictly inside, and
// the window image must be reproduced by the two Green columns against the
// edge sources. Returns max interior deviation relative to max |psi|.
double boundary_to_interior_residual(const BandedUnitary& op, Interval sub,
                                     const Boundary& sub_boundary, cplx z,
                                     const Eigen::VectorXcd& psi);

// ---- localization diagnostics ----

// max over theta pairs of |P(theta) - P(-theta)| / max |P| on the window
// [1, 4n-2] with the base phase shifted by -n Phi; conjugate boundary phases
// make this vanish
double evenness_residual(const WalkParameters& p, long n, cplx z, cplx beta1,
                         cplx beta2, int n_pairs = 32);

// relative Fourier mass of theta -> P(theta) outside the band |k| <= 2n-1,
// from a uniform DFT with 2^grid_log2 samples
double fourier_out_of_band(const WalkParameters& p, long n, cplx z,
                           int grid_log2 = 12);

// Hausdorff distance between the spectra of the closed truncation on
// [-n, n-1] and its alternating reflection (site and sign reversal)
double reflection_spectrum_distance(const WalkParameters& p, long n);

struct RegularityVerdict {
  long y = 0;
  double gamma = 0.0;
  long k = 0;
  bool is_regular = false;
  Interval witness;  // empty when singular
  double bound_left = 0.0;   // attained |G(y, n1)| e^{gamma (y - n1)}
  double bound_right = 0.0;  // attained |G(y, n2)| e^{gamma (n2 - y)}
};

// scans windows [n1, n2] containing y with n2 - n1 + 1 = k and both margins
// >= k / 7; regular iff some window has both Green entries below the
// e^{-gamma distance} envelope (closed unit boundaries)
RegularityVerdict regularity_verdict(const WalkParameters& p, cplx z,
                                     double gamma, long k, long y);

// (1 / (2n - 1)) ln of the worst Lagrange ratio over u in [-1, 1] for the
// node family cos 2 pi theta_j; u grid of u_grid points plus the nodes and
// their midpoints. Throws on duplicate cos nodes (within 1e-12).
double uniformity_measure(const std::vector<double>& thetas, int u_grid = 2048);

// node family theta + j Phi over the two continued-fraction index blocks
// attached to the target scale y
std::vector<double> uniformity_nodes(const WalkParameters& p, long y);

// Birkhoff growth rate of ln rho per CMV index, closed form
double rho_product_rate(const WalkParameters& p);

// ---- finite-volume spectra and spectral point selection ----

// eigenvalue angles only (no vectors), arg-sorted; checks |eigenvalue| = 1
// within 1e-9 when both boundaries are unit-modulus
std::vector<cplx> finite_volume_spectrum(const BandedUnitary& op);

// union of closed-truncation spectra over n_theta phases along the orbit
std::vector<cplx> spectrum_union(const WalkParameters& p, long size,
                                 int n_theta = 4);

struct SelectOptions {
  long size = 512;
  int n_theta = 4;             // base phase plus n_theta - 1 shifted copies
  long stride = 57;            // orbit stride between the shifted phases
  double stability_arc = 2e-3; // max drift of a kept eigenvalue angle
  double flip_arc = 1e-3;      // max mismatch against the flipped boundary
  int n_pick = 3;
  double min_spread = 0.3;     // pairwise arc separation of the picks
};

struct SpectralSelection {
  std::vector<cplx> base;    // closed-truncation spectrum at the base phase
  std::vector<cplx> stable;  // survivors of the stability and flip filters
  std::vector<cplx> picks;   // density-ranked, spread over the circle
};

// spectral points suitable for cocycle evaluation: eigenvalues that persist
// under phase shifts and boundary flips, ranked by local cluster density
// (isolated survivors tend to sit in spectral gaps)
SpectralSelection select_spectral_z(const WalkParameters& p,
                                    const SelectOptions& opt = {});

}  // namespace qwlab
