// model.cpp: parameter validation, sampling pair, coefficient generation,
// continued fractions, resonance scan.
#include "qwlab/model.hpp"

#include <cmath>

namespace qwlab {

WalkParameters WalkParameters::make(double lambda1, double lambda2, double t,
                                    double phi, double theta) {
  if (!(lambda1 > 0.0 && lambda1 < 1.0))
    throw std::invalid_argument("lambda1 must lie in (0, 1)");
  if (!(lambda2 > 0.0 && lambda2 < 1.0))
    throw std::invalid_argument("lambda2 must lie in (0, 1)");
  if (!(std::abs(t) < 1.0))
    throw std::invalid_argument("|t| must be < 1");
  if (!std::isfinite(phi) || !std::isfinite(theta))
    throw std::invalid_argument("phi and theta must be finite");
  WalkParameters p;
  p.lambda1 = lambda1;
  p.lambda2 = lambda2;
  p.t = t;
  p.phi = phi;
  p.theta = theta;
  p.lambda1p = std::sqrt(1.0 - lambda1 * lambda1);
  p.lambda2p = std::sqrt(1.0 - lambda2 * lambda2);
  p.k = -(1.0 + t * t);
  p.threshold = std::abs(1.0 - t * t) / (1.0 + t * t);
  return p;
}

namespace {

// e^{2 pi i (x + i eps)} and its reciprocal, exact in the exponential form
inline cplx torus_exp(ComplexPhasePoint w) {
  return std::polar(std::exp(-2.0 * kPi * w.eps), 2.0 * kPi * w.x);
}
inline cplx torus_exp_inv(ComplexPhasePoint w) {
  return std::polar(std::exp(2.0 * kPi * w.eps), -2.0 * kPi * w.x);
}

}  // namespace

cplx sample_f(const WalkParameters& p, ComplexPhasePoint w) {
  cplx e = torus_exp(w), ei = torus_exp_inv(w);
  return (p.t * p.lambda2 * e + p.t * p.lambda2 * ei +
          (p.t * p.t - 1.0) * p.lambda2p) /
         p.k;
}

cplx sample_g(const WalkParameters& p, ComplexPhasePoint w) {
  cplx e = torus_exp(w), ei = torus_exp_inv(w);
  return (-p.t * p.t * p.lambda2 * e + p.lambda2 * ei +
          2.0 * p.t * p.lambda2p) /
         p.k;
}

cplx sample_g_star(const WalkParameters& p, ComplexPhasePoint w) {
  cplx e = torus_exp(w), ei = torus_exp_inv(w);
  return (-p.t * p.t * p.lambda2 * ei + p.lambda2 * e +
          2.0 * p.t * p.lambda2p) /
         p.k;
}

double perturbed_norm(const WalkParameters& p, double r) {
  double t2 = p.t * p.t;
  return std::sqrt(1.0 + r * r + r * r / t2 + t2);
}

static void require_deformable(const WalkParameters& p) {
  if (p.t == 0.0)
    throw std::invalid_argument(
        "perturbed sampling functions are undefined at t = 0");
}

cplx sample_f_r(const WalkParameters& p, double r, ComplexPhasePoint w) {
  require_deformable(p);
  cplx e = torus_exp(w), ei = torus_exp_inv(w);
  double kr = -perturbed_norm(p, r);
  return ((r / p.t) * p.lambda2 * e + p.t * p.lambda2 * ei +
          (r - 1.0) * p.lambda2p) /
         kr;
}

cplx sample_g_r(const WalkParameters& p, double r, ComplexPhasePoint w) {
  require_deformable(p);
  cplx e = torus_exp(w), ei = torus_exp_inv(w);
  double kr = -perturbed_norm(p, r);
  return (-r * p.lambda2 * e + p.lambda2 * ei +
          (p.t + r / p.t) * p.lambda2p) /
         kr;
}

cplx sample_f_r_swap(const WalkParameters& p, double r, ComplexPhasePoint w) {
  require_deformable(p);
  cplx e = torus_exp(w), ei = torus_exp_inv(w);
  double kr = -perturbed_norm(p, r);
  return ((r / p.t) * p.lambda2 * ei + p.t * p.lambda2 * e +
          (r - 1.0) * p.lambda2p) /
         kr;
}

CoefficientSequence generate_coefficients(const WalkParameters& p,
                                          Interval window) {
  if (window.empty()) throw std::invalid_argument("empty coefficient window");
  CoefficientSequence seq;
  seq.window = window;
  seq.alphas.resize(window.size());
  seq.rhos.resize(window.size());
  for (long j = window.a; j <= window.b; ++j) {
    if ((j % 2 + 2) % 2 == 0) {  // even index 2n: shift pair
      seq.set_alpha(j, p.lambda1p);
      seq.set_rho(j, p.lambda1);
    } else {  // odd index 2n-1 with n = (j+1)/2: coin pair at theta + n phi
      long n = (j + 1) / 2;
      ComplexPhasePoint w{p.theta + n * p.phi, 0.0};
      seq.set_alpha(j, sample_g(p, w));
      seq.set_rho(j, sample_f(p, w));
    }
  }
  return seq;
}

CoefficientSequence gauged_coefficients(const WalkParameters& p,
                                        Interval window) {
  CoefficientSequence seq = generate_coefficients(p, window);
  for (auto& r : seq.rhos) r = std::abs(r);
  return seq;
}

ContinuedFractionData continued_fraction(double phi, int depth) {
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  if (!(phi > 0.0 && phi < 1.0))
    throw std::invalid_argument("phi must lie in (0, 1)");
  ContinuedFractionData cf;
  cf.phi = phi;
  double x = phi;
  // standard recurrence p_m = a_m p_{m-1} + p_{m-2}, seeded p_0=0, p_{-1}=1
  // and q_0=1, q_{-1}=0
  long long pm1 = 0, pm2 = 1;
  long long qm1 = 1, qm2 = 0;
  for (int m = 0; m < depth; ++m) {
    double inv = 1.0 / x;
    long long a = static_cast<long long>(std::floor(inv));
    if (a < 1) break;
    cf.partial_quotients.push_back(a);
    long long pnew = a * pm1 + pm2;
    long long qnew = a * qm1 + qm2;
    cf.convergent_numers.push_back(pnew);
    cf.convergent_denoms.push_back(qnew);
    pm2 = pm1; pm1 = pnew;
    qm2 = qm1; qm1 = qnew;
    x = inv - a;
    if (x < 1e-14) break;  // rational within double resolution
  }
  if (cf.partial_quotients.empty())
    throw std::invalid_argument("continued fraction expansion failed");
  return cf;
}

double ContinuedFractionData::tau() const {
  double worst = 1.0;
  for (size_t m = 0; m + 1 < convergent_denoms.size(); ++m) {
    double qa = static_cast<double>(convergent_denoms[m]);
    double qb = static_cast<double>(convergent_denoms[m + 1]);
    if (qa > 1.0) worst = std::max(worst, std::log(qb) / std::log(qa));
  }
  double tau = 1.0 + worst;
  return std::min(10.0, std::max(1.01, tau));
}

ResonanceReport resonance_test(const ContinuedFractionData& cf, double theta,
                               long N) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  ResonanceReport rep;
  double tau = cf.tau();
  for (long m = -2 * N; m <= 2 * N; ++m) {
    if (m == 0) continue;
    double n = 0.5 * m;
    double s = std::abs(std::sin(2.0 * kPi * (theta + n * cf.phi)));
    double bound = std::exp(-std::pow(std::abs(n), 1.0 / (2.0 * tau)));
    if (s < bound) {
      rep.is_resonant_up_to_N = true;
      rep.witnesses.push_back(n);
    }
  }
  return rep;
}

}  // namespace qwlab
