// gecmv.cpp: factored assembly of the banded walk operator and its
// truncations, diagonal gauge, componentwise walk application.
#include "qwlab/gecmv.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace qwlab {

namespace {

inline bool is_even(long j) { return ((j % 2) + 2) % 2 == 0; }

void check_normalization(const CoefficientSequence& c) {
  for (long j = c.window.a; j <= c.window.b; ++j) {
    double s = std::norm(c.alpha(j)) + std::norm(c.rho(j));
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument(
          "coefficient pair not normalized at index " + std::to_string(j));
  }
}

}  // namespace

BandedUnitary assemble(const CoefficientSequence& coeffs, Interval window,
                       const Boundary& boundary) {
  if (window.empty()) throw std::invalid_argument("empty operator window");
  if (coeffs.window.a > window.a - 1 || coeffs.window.b < window.b + 1)
    throw std::invalid_argument(
        "coefficients must cover [window.a - 1, window.b + 1]");
  check_normalization(coeffs);

  BandedUnitary op;
  op.window = window;
  op.boundary = boundary;
  op.coeffs.window = {window.a - 1, window.b + 1};
  op.coeffs.alphas.resize(op.coeffs.window.size());
  op.coeffs.rhos.resize(op.coeffs.window.size());
  for (long j = window.a - 1; j <= window.b + 1; ++j) {
    op.coeffs.set_alpha(j, coeffs.alpha(j));
    op.coeffs.set_rho(j, coeffs.rho(j));
  }
  auto substitute = [&op](long j, cplx beta) {
    if (std::abs(std::abs(beta) - 1.0) > 1e-12)
      throw std::invalid_argument("boundary value must have unit modulus");
    op.coeffs.set_alpha(j, beta);
    op.coeffs.set_rho(j, 0.0);
  };
  if (boundary.beta1) substitute(window.a - 1, *boundary.beta1);
  if (boundary.beta2) substitute(window.b, *boundary.beta2);
  return op;
}

Eigen::MatrixXcd build_factor(const BandedUnitary& op, Interval sub,
                              int parity) {
  if (sub.empty() || sub.a < op.window.a || sub.b > op.window.b)
    throw std::invalid_argument("sub-window outside operator window");
  const long a = sub.a, b = sub.b, dim = sub.size();
  Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(dim, dim);
  long j = (is_even(a - 1) == (parity == 0)) ? a - 1 : a;
  for (; j <= b; j += 2) {
    cplx al = op.coeffs.alpha(j);
    cplx rh = op.coeffs.rho(j);
    long lo = j, hi = j + 1;
    if (lo >= a && hi <= b) {
      F(lo - a, lo - a) = std::conj(al);
      F(lo - a, hi - a) = rh;
      F(hi - a, lo - a) = std::conj(rh);
      F(hi - a, hi - a) = -al;
    } else if (lo < a) {
      F(hi - a, hi - a) = -al;  // left corner of a straddling block
    } else {
      F(lo - a, lo - a) = std::conj(al);  // right corner
    }
  }
  return F;
}

Eigen::MatrixXcd truncate(const BandedUnitary& op, Interval sub) {
  return build_factor(op, sub, 0) * build_factor(op, sub, 1);
}

std::pair<BandedUnitary, GaugePhases> gauge_to_ecmv(const BandedUnitary& op) {
  BandedUnitary out = op;
  GaugePhases ph;
  ph.first_index = op.coeffs.window.a;
  ph.u.resize(op.coeffs.window.size() + 1);
  cplx u = 1.0;
  ph.u[0] = u;
  for (long j = op.coeffs.window.a; j <= op.coeffs.window.b; ++j) {
    cplx rh = op.coeffs.rho(j);
    double m = std::abs(rh);
    if (m < 1e-13) {
      // rho = 0 blocks are already diagonal; the phase propagates unchanged
      if (op.boundary.beta1 && j == op.window.a - 1) {
        out.coeffs.set_rho(j, 0.0);
      } else if (op.boundary.beta2 && j == op.window.b) {
        out.coeffs.set_rho(j, 0.0);
      } else {
        throw SingularSampleError(
            "gauge undefined: |rho| < 1e-13 at index " + std::to_string(j));
      }
    } else {
      u *= rh / m;
      out.coeffs.set_rho(j, m);
    }
    ph.u[j - op.coeffs.window.a + 1] = u;
  }
  return {out, ph};
}

Eigen::VectorXcd apply_cmv(const BandedUnitary& op,
                           const Eigen::VectorXcd& rhs) {
  if (rhs.size() != op.window.size())
    throw std::invalid_argument("state length must match operator window");
  // odd factor first, then even (the operator is evenfactor * oddfactor)
  Eigen::VectorXcd mid = build_factor(op, op.window, 1) * rhs;
  return build_factor(op, op.window, 0) * mid;
}

StateVector StateVector::zeros(long nmin, long nmax) {
  if (nmax < nmin) throw std::invalid_argument("empty state window");
  StateVector s;
  s.nmin = nmin;
  s.plus.assign(nmax - nmin + 1, 0.0);
  s.minus.assign(nmax - nmin + 1, 0.0);
  return s;
}

double StateVector::norm() const {
  double s = 0;
  for (const auto& v : plus) s += std::norm(v);
  for (const auto& v : minus) s += std::norm(v);
  return std::sqrt(s);
}

cplx StateVector::inner(const StateVector& other) const {
  if (nmin != other.nmin || size() != other.size())
    throw std::invalid_argument("state windows must match");
  cplx s = 0;
  for (long i = 0; i < size(); ++i) {
    s += std::conj(plus[i]) * other.plus[i];
    s += std::conj(minus[i]) * other.minus[i];
  }
  return s;
}

CoinTable make_coin_table(const WalkParameters& p, long nmin, long nmax) {
  CoinTable tab;
  tab.nmin = nmin;
  tab.q.resize(nmax - nmin + 1);
  for (long n = nmin; n <= nmax; ++n) {
    ComplexPhasePoint w{p.theta + n * p.phi, 0.0};
    cplx f = sample_f(p, w), g = sample_g(p, w);
    Eigen::Matrix2cd Q;
    Q << std::conj(f), -g, std::conj(g), f;
    tab.q[n - nmin] = Q;
  }
  return tab;
}

namespace {

struct WalkAccess {
  const StateVector& psi;
  cplx p(long n) const {
    return (n >= psi.nmin && n <= psi.nmax()) ? psi.plus[n - psi.nmin] : 0.0;
  }
  cplx m(long n) const {
    return (n >= psi.nmin && n <= psi.nmax()) ? psi.minus[n - psi.nmin] : 0.0;
  }
};

void check_light_cone(const StateVector& psi) {
  if (std::abs(psi.plus.front()) + std::abs(psi.minus.front()) +
          std::abs(psi.plus.back()) + std::abs(psi.minus.back()) !=
      0.0)
    throw std::invalid_argument(
        "state touches the window edge; enlarge the window");
}

}  // namespace

StateVector walk_apply(const WalkParameters& p, const CoinTable& coins,
                       const StateVector& psi) {
  check_light_cone(psi);
  WalkAccess in{psi};
  StateVector out = StateVector::zeros(psi.nmin, psi.nmax());
  const double l = p.lambda1, lp = p.lambda1p;
  for (long n = psi.nmin; n <= psi.nmax(); ++n) {
    const Eigen::Matrix2cd& qn = coins.at(n);
    cplx up = 0, um = 0;
    if (n - 1 >= coins.nmin) {
      const Eigen::Matrix2cd& ql = coins.at(n - 1);
      up += l * (ql(0, 0) * in.p(n - 1) + ql(0, 1) * in.m(n - 1));
    }
    up += -lp * (qn(1, 0) * in.p(n) + qn(1, 1) * in.m(n));
    if (n + 1 <= coins.nmax()) {
      const Eigen::Matrix2cd& qr = coins.at(n + 1);
      um += l * (qr(1, 0) * in.p(n + 1) + qr(1, 1) * in.m(n + 1));
    }
    um += lp * (qn(0, 0) * in.p(n) + qn(0, 1) * in.m(n));
    out.plus[n - psi.nmin] = up;
    out.minus[n - psi.nmin] = um;
  }
  return out;
}

StateVector walk_apply_transpose(const WalkParameters& p,
                                 const CoinTable& coins,
                                 const StateVector& psi) {
  check_light_cone(psi);
  WalkAccess in{psi};
  StateVector out = StateVector::zeros(psi.nmin, psi.nmax());
  const double l = p.lambda1, lp = p.lambda1p;
  for (long n = psi.nmin; n <= psi.nmax(); ++n) {
    const Eigen::Matrix2cd& qn = coins.at(n);
    cplx up = l * in.p(n + 1) + lp * in.m(n);
    cplx dn = -lp * in.p(n) + l * in.m(n - 1);
    out.plus[n - psi.nmin] = qn(0, 0) * up + qn(1, 0) * dn;
    out.minus[n - psi.nmin] = qn(0, 1) * up + qn(1, 1) * dn;
  }
  return out;
}

StateVector walk_apply_factored(const WalkParameters& p,
                                const StateVector& psi) {
  check_light_cone(psi);
  // site n maps to CMV pair (2n-1, 2n); pad one site so no block straddles
  long a = 2 * psi.nmin - 1, b = 2 * psi.nmax();
  CoefficientSequence coeffs =
      generate_coefficients(p, {a - 2, b + 2});
  BandedUnitary op = assemble(coeffs, {a, b}, Boundary::open());
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(b - a + 1);
  for (long n = psi.nmin; n <= psi.nmax(); ++n) {
    v[2 * n - 1 - a] = psi.plus[n - psi.nmin];
    v[2 * n - a] = psi.minus[n - psi.nmin];
  }
  Eigen::VectorXcd w = apply_cmv(op, v);
  StateVector out = StateVector::zeros(psi.nmin, psi.nmax());
  for (long n = psi.nmin; n <= psi.nmax(); ++n) {
    out.plus[n - psi.nmin] = w[2 * n - 1 - a];
    out.minus[n - psi.nmin] = w[2 * n - a];
  }
  return out;
}

double hausdorff_distance(const std::vector<cplx>& A,
                          const std::vector<cplx>& B) {
  if (A.empty() || B.empty())
    throw std::invalid_argument("hausdorff distance of empty set");
  auto one_sided = [](const std::vector<cplx>& X, const std::vector<cplx>& Y) {
    double worst = 0;
    for (const auto& x : X) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : Y) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(A, B), one_sided(B, A));
}

std::vector<cplx> sorted_eigenvalues(const Eigen::MatrixXcd& A) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(A, true);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed to converge");
  // per-pair backward error ||A v - lambda v|| against 1e-12 ||A||
  double scale = A.norm();
  Eigen::MatrixXcd R =
      A * solver.eigenvectors() -
      solver.eigenvectors() * solver.eigenvalues().asDiagonal();
  double worst = R.colwise().norm().maxCoeff();
  if (scale > 0 && worst > 1e-12 * scale)
    throw std::runtime_error("eigensolver backward error too large");
  std::vector<cplx> ev(solver.eigenvalues().data(),
                       solver.eigenvalues().data() + A.rows());
  auto arg02pi = [](cplx z) {
    double a = std::arg(z);
    return (a < 0) ? a + 2 * kPi : a;
  };
  std::sort(ev.begin(), ev.end(),
            [&](cplx x, cplx y) { return arg02pi(x) < arg02pi(y); });
  return ev;
}

}  // namespace qwlab
