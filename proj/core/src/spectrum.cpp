#include "qwlab/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "qwlab/lyapunov.hpp"

namespace qwlab {

namespace {

int parity_of(long j) { return static_cast<int>(((j % 2) + 2) % 2); }

double arc_distance(double a, double b) {
  double d = std::fmod(a - b + kPi, 2.0 * kPi);
  if (d < 0.0) d += 2.0 * kPi;
  return std::abs(d - kPi);
}

double min_arc_distance(const std::vector<double>& angles, double a) {
  double best = 2.0 * kPi;
  for (double other : angles) best = std::min(best, arc_distance(a, other));
  return best;
}

std::vector<double> sorted_angles(const std::vector<cplx>& pts) {
  std::vector<double> angles(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    double a = std::arg(pts[i]);
    angles[i] = (a < 0.0) ? a + 2.0 * kPi : a;
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

// closed unit-boundary operator on a centered window at a shifted phase
BandedUnitary closed_operator(const WalkParameters& p, double theta,
                              Interval window, cplx beta) {
  WalkParameters q = WalkParameters::make(p.lambda1, p.lambda2, p.t, p.phi,
                                          wrap01(theta));
  CoefficientSequence coeffs =
      generate_coefficients(q, {window.a - 1, window.b + 1});
  return assemble(coeffs, window, Boundary::closed(beta, beta));
}

}  // namespace

ScaledComplex char_poly_direct(const BandedUnitary& op, Interval sub, cplx z) {
  if (sub.empty()) return ScaledComplex::from(1.0);
  if (sub.size() > 64)
    throw std::invalid_argument(
        "char_poly_direct: window above 64, use the product route");
  Eigen::MatrixXcd A = -truncate(op, sub);
  A.diagonal().array() += z;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  ScaledComplex det = ScaledComplex::from(
      static_cast<double>(lu.permutationP().determinant()));
  Eigen::VectorXcd diag = lu.matrixLU().diagonal();
  for (long i = 0; i < diag.size(); ++i)
    det = det * ScaledComplex::from(diag(i));
  return det;
}

ScaledComplex char_poly_product(const BandedUnitary& op, Interval sub,
                                cplx z) {
  if (sub.empty()) return ScaledComplex::from(1.0);
  for (long j = sub.a; j < sub.b; ++j) {
    cplx rho = op.coeffs.rho(j);
    if (std::abs(rho.imag()) > 1e-12 * (1.0 + std::abs(rho)))
      throw std::invalid_argument(
          "char_poly_product: rho not real, gauge to ECMV form first");
  }
  Eigen::Matrix2cd M = Eigen::Matrix2cd::Identity();
  double log_scale = 0.0;
  int since_rescale = 0;
  for (long j = sub.a; j < sub.b; ++j) {
    cplx alpha = op.coeffs.alpha(j);
    Eigen::Matrix2cd S;
    S << z, -std::conj(alpha), -alpha * z, 1.0;
    M = (S * M).eval();
    if (++since_rescale == 16) {
      since_rescale = 0;
      double m = M.cwiseAbs().maxCoeff();
      if (m > 0.0) {
        M /= m;
        log_scale += std::log(m);
      }
    }
  }
  cplx beta1 = op.coeffs.alpha(sub.a - 1);
  cplx beta2 = op.coeffs.alpha(sub.b);
  Eigen::Matrix2cd B1, B2;
  B1 << 1.0, 1.0, -beta1, beta1;
  B2 << z, -std::conj(beta2), z, std::conj(beta2);
  ScaledComplex result = ScaledComplex::from((B2 * M * B1)(0, 0));
  result.log_scale += log_scale;
  return result;
}

GreenFrame green_function(const BandedUnitary& op, Interval sub, cplx z) {
  if (sub.empty()) throw std::invalid_argument("green_function: empty window");
  Eigen::MatrixXcd A =
      z * build_factor(op, sub, 0).adjoint() - build_factor(op, sub, 1);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (pivots.minCoeff() < 1e-12 * pivots.maxCoeff()) {
    std::ostringstream msg;
    msg << "green_function: z = " << z.real() << (z.imag() < 0 ? " - " : " + ")
        << std::abs(z.imag()) << "i is numerically an eigenvalue of the window";
    throw std::runtime_error(msg.str());
  }
  GreenFrame frame;
  frame.window = sub;
  frame.z = z;
  frame.G = lu.solve(Eigen::MatrixXcd::Identity(sub.size(), sub.size()));
  return frame;
}

namespace {

// log|det(z L* - M)| over sub by the three-term minor recurrence. The pencil
// is tridiagonal because both factors are block diagonal: row n couples to
// n - 1 through z rho_{n-1} (n - 1 even) or -rho_{n-1} (n - 1 odd), and the
// diagonal mixes the two alphas whose blocks cover n. Empty windows give 0.
double log_pencil_abs(const BandedUnitary& op, Interval sub, cplx z) {
  if (sub.empty()) return 0.0;
  cplx prev = 0.0;
  cplx cur = 1.0;
  double log_scale = 0.0;
  int since_rescale = 0;
  for (long n = sub.a; n <= sub.b; ++n) {
    cplx diag = (parity_of(n) == 0)
                    ? z * op.coeffs.alpha(n) + op.coeffs.alpha(n - 1)
                    : -z * std::conj(op.coeffs.alpha(n - 1)) -
                          std::conj(op.coeffs.alpha(n));
    cplx hop2 = 0.0;
    if (n > sub.a) {
      cplx r = op.coeffs.rho(n - 1);
      hop2 = r * std::conj(r);
      if (parity_of(n - 1) == 0) hop2 *= z * z;
    }
    cplx next = diag * cur - hop2 * prev;
    prev = cur;
    cur = next;
    if (++since_rescale == 16) {
      since_rescale = 0;
      double m = std::max(std::abs(cur), std::abs(prev));
      if (m > 0.0) {
        cur /= m;
        prev /= m;
        log_scale += std::log(m);
      }
    }
  }
  return std::log(std::abs(cur)) + log_scale;
}

}  // namespace

double green_abs_cramer(const BandedUnitary& op, Interval sub, cplx z, long u,
                        long v) {
  if (!sub.contains(u) || !sub.contains(v))
    throw std::invalid_argument("green_abs_cramer: entry outside the window");
  long lo = std::min(u, v);
  long hi = std::max(u, v);
  double log_hop = 0.0;
  for (long j = lo; j < hi; ++j) {
    double r = std::abs(op.coeffs.rho(j));
    if (r == 0.0) return 0.0;
    log_hop += std::log(r);
    if (parity_of(j) == 0) log_hop += std::log(std::abs(z));
  }
  double left = log_pencil_abs(op, {sub.a, lo - 1}, z);
  double right = log_pencil_abs(op, {hi + 1, sub.b}, z);
  double whole = log_pencil_abs(op, sub, z);
  return std::exp(log_hop + left + right - whole);
}

double boundary_to_interior_residual(const BandedUnitary& op, Interval sub,
                                     const Boundary& sub_boundary, cplx z,
                                     const Eigen::VectorXcd& psi) {
  if (sub.a - 1 < op.window.a || sub.b + 1 > op.window.b)
    throw std::invalid_argument(
        "boundary_to_interior_residual: sub must sit strictly inside");
  if (psi.size() != op.window.size())
    throw std::invalid_argument(
        "boundary_to_interior_residual: psi must span op's window");
  const long a = sub.a;
  const long b = sub.b;
  auto at = [&](long n) { return psi(n - op.window.a); };
  cplx alpha_a = op.coeffs.alpha(a - 1);
  cplx rho_a = op.coeffs.rho(a - 1);
  cplx alpha_b = op.coeffs.alpha(b);
  cplx rho_b = op.coeffs.rho(b);
  cplx b1 = sub_boundary.beta1.value_or(alpha_a);
  cplx b2 = sub_boundary.beta2.value_or(alpha_b);

  BandedUnitary sub_op = assemble(op.coeffs, sub, sub_boundary);
  Eigen::MatrixXcd G = green_function(sub_op, sub, z).G;

  cplx source_a, source_b;
  if (parity_of(a) == 0)
    source_a = rho_a * at(a - 1) - (alpha_a - b1) * at(a);
  else
    source_a = (z * std::conj(alpha_a) - z * std::conj(b1)) * at(a) -
               z * rho_a * at(a - 1);
  if (parity_of(b) == 0)
    source_b = (z * b2 - z * alpha_b) * at(b) - z * rho_b * at(b + 1);
  else
    source_b = (std::conj(alpha_b) - std::conj(b2)) * at(b) + rho_b * at(b + 1);

  double scale = psi.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (long y = a + 2; y <= b - 2; ++y) {
    cplx predicted = G(y - a, 0) * source_a + G(y - a, b - a) * source_b;
    worst = std::max(worst, std::abs(predicted - at(y)) / scale);
  }
  return worst;
}

namespace {

// characteristic polynomial of the window [1, 4n-2] with the base phase
// shifted down by n turns of the frequency (the evenness convention)
cplx shifted_char_poly(const WalkParameters& p, long n, cplx z, cplx beta1,
                       cplx beta2, double theta) {
  WalkParameters q = WalkParameters::make(
      p.lambda1, p.lambda2, p.t, p.phi, wrap01(theta - double(n) * p.phi));
  Interval window{1, 4 * n - 2};
  CoefficientSequence coeffs =
      generate_coefficients(q, {window.a - 1, window.b + 1});
  BandedUnitary op = assemble(coeffs, window, Boundary::closed(beta1, beta2));
  return char_poly_direct(op, window, z).value();
}

}  // namespace

double evenness_residual(const WalkParameters& p, long n, cplx z, cplx beta1,
                         cplx beta2, int n_pairs) {
  double worst = 0.0;
  double scale = 0.0;
  for (int s = 0; s < n_pairs; ++s) {
    double theta = (s + 0.37) / (2.0 * n_pairs);
    cplx plus = shifted_char_poly(p, n, z, beta1, beta2, theta);
    cplx minus = shifted_char_poly(p, n, z, beta1, beta2, -theta);
    worst = std::max(worst, std::abs(plus - minus));
    scale = std::max({scale, std::abs(plus), std::abs(minus)});
  }
  return worst / std::max(scale, 1e-300);
}

double fourier_out_of_band(const WalkParameters& p, long n, cplx z,
                           int grid_log2) {
  const long N = 1L << grid_log2;
  std::vector<cplx> h(N);
  for (long k = 0; k < N; ++k)
    h[k] = shifted_char_poly(p, n, z, 1.0, 1.0, double(k) / double(N));
  // naive DFT; the windows are tiny and N is 4096, well within budget
  const long band = 2 * n - 1;
  double in_band = 0.0;
  double total = 0.0;
  for (long m = 0; m < N; ++m) {
    cplx c = 0.0;
    for (long k = 0; k < N; ++k) {
      double angle = -2.0 * kPi * double(m) * double(k) / double(N);
      c += h[k] * cplx(std::cos(angle), std::sin(angle));
    }
    long signed_m = (m <= N / 2) ? m : m - N;
    double mass = std::norm(c);
    total += mass;
    if (std::abs(signed_m) <= band) in_band += mass;
  }
  return (total - in_band) / total;
}

double reflection_spectrum_distance(const WalkParameters& p, long n) {
  Interval window{-n, n - 1};
  BandedUnitary op = closed_operator(p, p.theta, window, 1.0);
  Eigen::MatrixXcd E = truncate(op, window);
  const long dim = window.size();
  Eigen::MatrixXcd R(dim, dim);
  for (long i = window.a; i <= window.b; ++i)
    for (long j = window.a; j <= window.b; ++j) {
      double sign = (parity_of(i + j) == 0) ? 1.0 : -1.0;
      R(i - window.a, j - window.a) =
          sign * E(-1 - i - window.a, -1 - j - window.a);
    }
  return hausdorff_distance(sorted_eigenvalues(E), sorted_eigenvalues(R));
}

RegularityVerdict regularity_verdict(const WalkParameters& p, cplx z,
                                     double gamma, long k, long y) {
  if (gamma <= 0.0 || k < 7)
    throw std::invalid_argument("regularity_verdict: need gamma > 0, k >= 7");
  RegularityVerdict verdict;
  verdict.y = y;
  verdict.gamma = gamma;
  verdict.k = k;
  const double margin = double(k) / 7.0;
  CoefficientSequence coeffs =
      generate_coefficients(p, {y - k - 1, y + k + 1});
  double best_excess = std::numeric_limits<double>::infinity();
  for (long n1 = y - k + 1; n1 <= y; ++n1) {
    long n2 = n1 + k - 1;
    double d1 = double(y - n1);
    double d2 = double(n2 - y);
    if (d1 < margin || d2 < margin) continue;
    BandedUnitary op = assemble(coeffs, {n1, n2}, Boundary::closed(1.0, 1.0));
    Eigen::MatrixXcd G;
    try {
      G = green_function(op, {n1, n2}, z).G;
    } catch (const std::runtime_error&) {
      continue;  // z resonant with this window
    }
    double bl = std::abs(G(y - n1, 0));
    double br = std::abs(G(y - n1, k - 1));
    double excess = std::max(bl * std::exp(gamma * d1),
                             br * std::exp(gamma * d2));
    if (excess < best_excess) {
      best_excess = excess;
      verdict.bound_left = bl;
      verdict.bound_right = br;
      verdict.witness = {n1, n2};
    }
    if (bl < std::exp(-gamma * d1) && br < std::exp(-gamma * d2)) {
      verdict.is_regular = true;
      verdict.bound_left = bl;
      verdict.bound_right = br;
      verdict.witness = {n1, n2};
      return verdict;
    }
  }
  if (!verdict.is_regular && best_excess ==
      std::numeric_limits<double>::infinity())
    verdict.witness = Interval{};
  return verdict;
}

double uniformity_measure(const std::vector<double>& thetas, int u_grid) {
  const size_t n2 = thetas.size();
  if (n2 < 2)
    throw std::invalid_argument("uniformity_measure: need at least two nodes");
  std::vector<double> nodes(n2);
  for (size_t j = 0; j < n2; ++j) nodes[j] = std::cos(2.0 * kPi * thetas[j]);
  for (size_t i = 0; i < n2; ++i)
    for (size_t j = i + 1; j < n2; ++j)
      if (std::abs(nodes[i] - nodes[j]) < 1e-12)
        throw std::invalid_argument("uniformity_measure: duplicate cos nodes");

  std::vector<double> grid = linspace(-1.0, 1.0, u_grid);
  std::vector<double> sorted_nodes = nodes;
  std::sort(sorted_nodes.begin(), sorted_nodes.end());
  grid.insert(grid.end(), sorted_nodes.begin(), sorted_nodes.end());
  for (size_t i = 0; i + 1 < sorted_nodes.size(); ++i)
    grid.push_back(0.5 * (sorted_nodes[i] + sorted_nodes[i + 1]));

  std::vector<double> log_denom(n2, 0.0);
  for (size_t j = 0; j < n2; ++j)
    for (size_t i = 0; i < n2; ++i)
      if (i != j) log_denom[j] += std::log(std::abs(nodes[j] - nodes[i]));

  double worst = -std::numeric_limits<double>::infinity();
  for (double u : grid) {
    for (size_t j = 0; j < n2; ++j) {
      double log_numer = 0.0;
      for (size_t i = 0; i < n2; ++i) {
        if (i == j) continue;
        double d = std::abs(u - nodes[i]);
        if (d == 0.0) {
          log_numer = -std::numeric_limits<double>::infinity();
          break;
        }
        log_numer += std::log(d);
      }
      worst = std::max(worst, log_numer - log_denom[j]);
    }
  }
  return worst / double(n2 - 1);
}

std::vector<double> uniformity_nodes(const WalkParameters& p, long y) {
  ContinuedFractionData cf = continued_fraction(p.phi, 40);
  const double target = double(y) / 16.0;
  long qm = -1;
  for (size_t m = 0; m < cf.convergent_denoms.size(); ++m) {
    long q = static_cast<long>(cf.convergent_denoms[m]);
    if (double(q) <= target) qm = q;
  }
  if (qm < 1)
    throw std::invalid_argument("uniformity_nodes: y too small for this phi");
  long s = 1;
  while (double((s + 1) * qm) < target) ++s;
  const long sq = s * qm;
  const long i1_lo = (sq % 2 == 0) ? 1 : 0;  // (1 + (-1)^{sq}) / 2
  std::vector<double> thetas;
  for (long j = i1_lo; j <= sq; ++j)
    thetas.push_back(p.theta + double(j) * p.phi);
  for (long j = 1 + y - sq; j <= y + sq; ++j)
    thetas.push_back(p.theta + double(j) * p.phi);
  return thetas;
}

double rho_product_rate(const WalkParameters& p) {
  return 0.5 * (std::log(p.lambda1) + jensen_closed_form(p, 0.0));
}

std::vector<cplx> finite_volume_spectrum(const BandedUnitary& op) {
  Eigen::MatrixXcd E = truncate(op, op.window);
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(E, false);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("finite_volume_spectrum: Schur failed");
  std::vector<cplx> values(E.rows());
  for (long i = 0; i < E.rows(); ++i) values[i] = schur.matrixT()(i, i);
  if (op.boundary.beta1 && op.boundary.beta2) {
    for (cplx v : values)
      if (std::abs(std::abs(v) - 1.0) > 1e-9)
        throw std::runtime_error(
            "finite_volume_spectrum: eigenvalue off the unit circle");
  }
  std::sort(values.begin(), values.end(), [](cplx a, cplx b) {
    double aa = std::arg(a);
    double ab = std::arg(b);
    if (aa < 0.0) aa += 2.0 * kPi;
    if (ab < 0.0) ab += 2.0 * kPi;
    return aa < ab;
  });
  return values;
}

std::vector<cplx> spectrum_union(const WalkParameters& p, long size,
                                 int n_theta) {
  Interval window{-(size / 2), -(size / 2) + size - 1};
  std::vector<cplx> all;
  for (int j = 0; j < n_theta; ++j) {
    double theta = p.theta + double(j) * 57.0 * p.phi;
    std::vector<cplx> spec =
        finite_volume_spectrum(closed_operator(p, theta, window, 1.0));
    all.insert(all.end(), spec.begin(), spec.end());
  }
  std::sort(all.begin(), all.end(), [](cplx a, cplx b) {
    double aa = std::arg(a);
    double ab = std::arg(b);
    if (aa < 0.0) aa += 2.0 * kPi;
    if (ab < 0.0) ab += 2.0 * kPi;
    return aa < ab;
  });
  return all;
}

SpectralSelection select_spectral_z(const WalkParameters& p,
                                    const SelectOptions& opt) {
  Interval window{-(opt.size / 2), -(opt.size / 2) + opt.size - 1};
  SpectralSelection sel;
  sel.base = finite_volume_spectrum(closed_operator(p, p.theta, window, 1.0));
  std::vector<std::vector<double>> shifted;
  for (int j = 1; j < opt.n_theta; ++j) {
    double theta = p.theta + double(j) * double(opt.stride) * p.phi;
    shifted.push_back(sorted_angles(
        finite_volume_spectrum(closed_operator(p, theta, window, 1.0))));
  }
  std::vector<double> flipped = sorted_angles(
      finite_volume_spectrum(closed_operator(p, p.theta, window, -1.0)));

  std::vector<double> base_angles = sorted_angles(sel.base);
  const size_t n = base_angles.size();
  struct Candidate {
    double nn_gap;
    double angle;
  };
  std::vector<Candidate> candidates;
  for (size_t i = 0; i < n; ++i) {
    double ang = base_angles[i];
    bool ok = true;
    for (const auto& spec : shifted)
      if (min_arc_distance(spec, ang) > opt.stability_arc) {
        ok = false;
        break;
      }
    if (ok && min_arc_distance(flipped, ang) > opt.flip_arc) ok = false;
    if (!ok) continue;
    double prev = base_angles[(i + n - 1) % n];
    double next = base_angles[(i + 1) % n];
    double gap = std::min(arc_distance(ang, prev), arc_distance(ang, next));
    candidates.push_back({gap, ang});
    sel.stable.push_back(std::polar(1.0, ang));
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.nn_gap < b.nn_gap;
            });
  std::vector<double> picked;
  for (const auto& c : candidates) {
    if (static_cast<int>(picked.size()) == opt.n_pick) break;
    bool far = true;
    for (double q : picked)
      if (arc_distance(c.angle, q) <= opt.min_spread) {
        far = false;
        break;
      }
    if (far) picked.push_back(c.angle);
  }
  for (const auto& c : candidates) {
    if (static_cast<int>(picked.size()) == opt.n_pick) break;
    if (std::find(picked.begin(), picked.end(), c.angle) == picked.end())
      picked.push_back(c.angle);
  }
  for (double a : picked) sel.picks.push_back(std::polar(1.0, a));
  return sel;
}

}  // namespace qwlab
