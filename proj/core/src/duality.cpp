#include "qwlab/duality.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qwlab {

namespace {

cplx torus_exp(double x) { return std::polar(1.0, 2.0 * kPi * x); }

// Fourier sums (F psi^+, F psi^-)(x) over the window
std::pair<cplx, cplx> fourier_pair(const StateVector& psi, double x) {
  cplx up = 0.0, dn = 0.0;
  for (long k = psi.nmin; k <= psi.nmax(); ++k) {
    cplx e = torus_exp(wrap01(static_cast<double>(k) * x));
    up += psi.plus[k - psi.nmin] * e;
    dn += psi.minus[k - psi.nmin] * e;
  }
  return {up, dn};
}

// embed psi in a window padded by one zero site on each side so a single
// walk application never reads the edge
StateVector pad_by_one(const StateVector& psi) {
  StateVector out = StateVector::zeros(psi.nmin - 1, psi.nmax() + 1);
  for (long n = psi.nmin; n <= psi.nmax(); ++n) {
    out.plus[n - out.nmin] = psi.plus[n - psi.nmin];
    out.minus[n - out.nmin] = psi.minus[n - psi.nmin];
  }
  return out;
}

}  // namespace

MixingConstants mixing_constants(const WalkParameters& p) {
  const double s = std::sqrt(1.0 + p.t * p.t);
  return {1.0 / s, p.t / s};
}

StateVector dual_transform(const StateVector& psi, const WalkParameters& p,
                           double xi) {
  const auto [a, b] = mixing_constants(p);
  StateVector out = StateVector::zeros(psi.nmin, psi.nmax());
  for (long n = psi.nmin; n <= psi.nmax(); ++n) {
    const double x = wrap01(xi + static_cast<double>(n) * p.phi);
    const auto [up, dn] = fourier_pair(psi, x);
    const cplx ph = torus_exp(wrap01(static_cast<double>(n) * p.theta));
    out.plus[n - psi.nmin] = ph * (a * up + b * dn);
    out.minus[n - psi.nmin] = ph * (b * up - a * dn);
  }
  return out;
}

StateVector dual_round_trip(const StateVector& psi, const WalkParameters& p,
                            int n_xi, double grid_offset) {
  if (n_xi < 1) throw std::invalid_argument("round trip needs n_xi >= 1");
  const auto [a, b] = mixing_constants(p);
  const long w = psi.size();
  StateVector acc = StateVector::zeros(psi.nmin, psi.nmax());
  for (int j = 0; j < n_xi; ++j) {
    const double xi = (j + grid_offset) / n_xi;
    const StateVector phi = dual_transform(psi, p, xi);
    for (long n = psi.nmin; n <= psi.nmax(); ++n) {
      const cplx ph =
          std::conj(torus_exp(wrap01(static_cast<double>(n) * p.theta)));
      const cplx vp = ph * phi.plus[n - psi.nmin];
      const cplx vm = ph * phi.minus[n - psi.nmin];
      const cplx up = a * vp + b * vm;
      const cplx dn = b * vp - a * vm;
      const double x = wrap01(xi + static_cast<double>(n) * p.phi);
      for (long k = psi.nmin; k <= psi.nmax(); ++k) {
        const cplx e =
            std::conj(torus_exp(wrap01(static_cast<double>(k) * x)));
        acc.plus[k - psi.nmin] += e * up;
        acc.minus[k - psi.nmin] += e * dn;
      }
    }
  }
  const double scale = 1.0 / (static_cast<double>(n_xi) * w);
  for (long i = 0; i < w; ++i) {
    acc.plus[i] *= scale;
    acc.minus[i] *= scale;
  }
  return acc;
}

double parseval_mass(const StateVector& psi, const WalkParameters& p, int n_xi,
                     double grid_offset) {
  double total = 0.0;
  for (int j = 0; j < n_xi; ++j) {
    const double xi = (j + grid_offset) / n_xi;
    const StateVector phi = dual_transform(psi, p, xi);
    total += phi.norm() * phi.norm();
  }
  return total / (static_cast<double>(n_xi) * psi.size());
}

DualityReport duality_residual(const WalkParameters& p, long truncation_size,
                               int n_eigpairs, int n_xi) {
  if (truncation_size < 64 || truncation_size % 4 != 0)
    throw std::invalid_argument(
        "truncation_size must be a multiple of 4, at least 64");
  if (n_eigpairs < 1 || n_xi < 4)
    throw std::invalid_argument("need n_eigpairs >= 1 and n_xi >= 4");

  // sites [-m, m-1] map to the CMV window [-2m-1, 2m-2] of requested length
  const long m = truncation_size / 4;
  const long nmin = -m, nmax = m - 1;
  const Interval cmv{2 * nmin - 1, 2 * nmax};
  CoefficientSequence coeffs = generate_coefficients(p, {cmv.a - 1, cmv.b + 1});
  BandedUnitary op = assemble(coeffs, cmv, Boundary::closed());
  const Eigen::MatrixXcd E = truncate(op);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(E, true);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed on the closed truncation");

  // rank eigenvectors by CMV-index concentration around the center
  const long dim = cmv.size();
  std::vector<std::pair<double, long>> mass(dim);
  for (long c = 0; c < dim; ++c) {
    double s = 0.0;
    for (long r = 0; r < dim; ++r)
      s += std::norm(es.eigenvectors()(r, c)) * std::abs(cmv.a + r);
    mass[c] = {s, c};
  }
  std::sort(mass.begin(), mass.end());
  const int n_pairs = static_cast<int>(
      std::min<long>(n_eigpairs, dim));

  // xi grid with resonant phases excluded (the intertwining holds a.e.):
  // the scan's witnesses mark near-zeros of sin 2 pi (xi + n Phi), and a
  // grid point within 1e-3 of an exact zero is dropped
  ContinuedFractionData cf = continued_fraction(p.phi, 40);
  std::vector<double> grid;
  int excluded = 0;
  for (int j = 0; j < n_xi; ++j) {
    const double xi = (j + 0.37) / n_xi;
    bool bad = false;
    for (double nw : resonance_test(cf, xi, 8).witnesses)
      bad = bad || dist_to_int(2.0 * (xi + nw * p.phi)) / 2.0 < 1e-3;
    if (bad)
      ++excluded;
    else
      grid.push_back(xi);
  }
  if (grid.empty())
    throw std::runtime_error("every xi grid point is resonant; change n_xi");

  DualityReport report;
  report.n_xi = n_xi;
  report.excluded_xi = excluded;
  std::vector<double> pooled;

  for (int i = 0; i < n_pairs; ++i) {
    const long col = mass[i].second;
    const cplx z = es.eigenvalues()(col);
    Eigen::VectorXcd v = es.eigenvectors().col(col);

    DualityPairReport pr;
    pr.eigenvalue = z;
    pr.source_residual = (E * v - z * v).norm() / v.norm();

    // CMV column to site components: site n carries (2n-1, 2n)
    StateVector psi = StateVector::zeros(nmin, nmax);
    for (long n = nmin; n <= nmax; ++n) {
      psi.plus[n - nmin] = v(2 * n - 1 - cmv.a);
      psi.minus[n - nmin] = v(2 * n - cmv.a);
    }

    for (double xi : grid) {
      StateVector phi = pad_by_one(dual_transform(psi, p, xi));
      WalkParameters dual =
          WalkParameters::make(p.lambda2, p.lambda1, p.t, p.phi, xi);
      CoinTable coins = make_coin_table(dual, phi.nmin, phi.nmax());
      StateVector wphi = walk_apply_transpose(dual, coins, phi);

      // interior half-window: middle half of the site range
      const long lo = nmin + (nmax - nmin + 1) / 4;
      const long hi = nmax - (nmax - nmin + 1) / 4;
      double num = 0.0, den = 0.0, tot = 0.0;
      for (long n = phi.nmin; n <= phi.nmax(); ++n) {
        const double wn = std::norm(phi.plus[n - phi.nmin]) +
                          std::norm(phi.minus[n - phi.nmin]);
        tot += wn;
        if (n < lo || n > hi) continue;
        num += std::norm(wphi.plus[n - phi.nmin] -
                         z * phi.plus[n - phi.nmin]) +
               std::norm(wphi.minus[n - phi.nmin] -
                         z * phi.minus[n - phi.nmin]);
        den += wn;
      }
      pr.interior_mass += (tot > 0.0) ? den / tot : 0.0;
      const double r = (den > 0.0) ? std::sqrt(num / den)
                                   : std::numeric_limits<double>::infinity();
      pr.residuals.push_back(r);
      pooled.push_back(r);
    }
    pr.interior_mass /= static_cast<double>(grid.size());
    pr.low_interior_mass = pr.interior_mass < 0.10;
    pr.median_residual = median(pr.residuals);
    pr.max_residual =
        *std::max_element(pr.residuals.begin(), pr.residuals.end());
    report.pairs.push_back(std::move(pr));
  }

  report.median_residual = median(pooled);
  report.max_residual = *std::max_element(pooled.begin(), pooled.end());
  return report;
}

}  // namespace qwlab
