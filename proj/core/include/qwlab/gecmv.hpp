// gecmv.hpp: banded five-diagonal walk operator as a product of two block
// factors, truncations with boundary substitution, gauge to nonnegative rho,
// and walk-basis application paths.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "qwlab/model.hpp"

namespace qwlab {

// boundary condition of a truncation: beta replaces the coefficient alpha just
// outside each edge (alpha_{a-1} and alpha_b); nullopt keeps the actual value
// ("open" compression). Unit-modulus betas decouple the window exactly.
struct Boundary {
  std::optional<cplx> beta1;
  std::optional<cplx> beta2;

  static Boundary open() { return {}; }
  static Boundary closed(cplx b1 = 1.0, cplx b2 = 1.0) { return {b1, b2}; }
};

// operator window [a, b] plus the coefficients needed to build it, including
// the substituted edge values at a-1 and b
struct BandedUnitary {
  Interval window;
  CoefficientSequence coeffs;  // window [a-1, b+1], betas baked in
  Boundary boundary;
};

// validates (|beta| = 1 when given, coefficient normalization) and bakes the
// boundary into a copy of the coefficients. `coeffs` must cover [a-1, b+1].
BandedUnitary assemble(const CoefficientSequence& coeffs, Interval window,
                       const Boundary& boundary);

// dense factors of the compression to sub (block-diagonal up to edge corners);
// the compressed operator is exactly their product for every window parity
Eigen::MatrixXcd build_factor(const BandedUnitary& op, Interval sub,
                              int parity);
Eigen::MatrixXcd truncate(const BandedUnitary& op, Interval sub);
inline Eigen::MatrixXcd truncate(const BandedUnitary& op) {
  return truncate(op, op.window);
}

// diagonal gauge making every rho nonnegative; alphas are untouched.
// Throws SingularSampleError if some |rho| < 1e-13 inside the window.
struct GaugePhases {
  long first_index = 0;         // phase attached to the window's first site
  std::vector<cplx> u;          // unimodular diagonal entries
};
std::pair<BandedUnitary, GaugePhases> gauge_to_ecmv(const BandedUnitary& op);

// apply through the two factors on a window-length vector (CMV indexing)
Eigen::VectorXcd apply_cmv(const BandedUnitary& op,
                           const Eigen::VectorXcd& rhs);

// two-component state over walk sites [nmin, nmin + size - 1]
struct StateVector {
  long nmin = 0;
  std::vector<cplx> plus;
  std::vector<cplx> minus;

  long nmax() const { return nmin + static_cast<long>(plus.size()) - 1; }
  long size() const { return static_cast<long>(plus.size()); }
  static StateVector zeros(long nmin, long nmax);
  double norm() const;
  // inner product <this, other>, antilinear in this (windows must match)
  cplx inner(const StateVector& other) const;
};

// coin matrices over a site window, evaluated once (the walk is autonomous)
struct CoinTable {
  long nmin = 0;
  std::vector<Eigen::Matrix2cd> q;
  long nmax() const { return nmin + static_cast<long>(q.size()) - 1; }
  const Eigen::Matrix2cd& at(long n) const { return q[n - nmin]; }
};
CoinTable make_coin_table(const WalkParameters& p, long nmin, long nmax);

// one walk step in the split componentwise form; reads out of window as zero.
// The light cone must stay >= 1 site inside the window or the step throws.
StateVector walk_apply(const WalkParameters& p, const CoinTable& coins,
                       const StateVector& psi);
// transposed walk in the same componentwise form
StateVector walk_apply_transpose(const WalkParameters& p,
                                 const CoinTable& coins,
                                 const StateVector& psi);

// same walk step routed through the factored CMV operator (oracle path);
// psi's window is mapped onto CMV indices [2 nmin - 1, 2 nmax]
StateVector walk_apply_factored(const WalkParameters& p,
                                const StateVector& psi);

// chord-metric Hausdorff distance between two finite spectra
double hausdorff_distance(const std::vector<cplx>& A,
                          const std::vector<cplx>& B);

// eigenvalues of the dense matrix sorted by principal argument in [0, 2 pi);
// throws on backward error above 1e-12 * ||A||
std::vector<cplx> sorted_eigenvalues(const Eigen::MatrixXcd& A);

}  // namespace qwlab
