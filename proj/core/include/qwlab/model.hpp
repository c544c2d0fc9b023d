// model.hpp: walk parameters, quasi-periodic sampling functions, Verblunsky
// coefficient sequences, continued fractions and resonance diagnostics.
#pragma once

#include <complex>
#include <vector>

#include "qwlab/common.hpp"

namespace qwlab {

// parameter pack of the two-parameter coined walk; lambda1 drives the shift,
// lambda2 the coin, t the coin profile, phi the frequency, theta the phase
struct WalkParameters {
  double lambda1 = 0.5;
  double lambda2 = 0.5;
  double t = 0.5;
  double phi = 0.6180339887498948;
  double theta = 0.0;

  // derived constants, filled by make()
  double lambda1p = 0.0;  // sqrt(1 - lambda1^2)
  double lambda2p = 0.0;  // sqrt(1 - lambda2^2)
  double k = 0.0;         // -(1 + t^2), normalization of the sampling pair
  double threshold = 0.0; // |1 - t^2| / (1 + t^2), singularity boundary

  // validates ranges (lambda in (0,1), |t| < 1) and fills the derived fields
  static WalkParameters make(double lambda1, double lambda2, double t,
                             double phi, double theta);

  bool coin_singular_possible() const { return lambda2 >= threshold; }
};

// point x + i*eps on the complexified torus
struct ComplexPhasePoint {
  double x = 0.0;
  double eps = 0.0;
};

// sampling pair (f, g) with |f|^2 + |g|^2 = 1 on the real torus; evaluated in
// exponential form so complex eps is exact
cplx sample_f(const WalkParameters& p, ComplexPhasePoint w);
cplx sample_g(const WalkParameters& p, ComplexPhasePoint w);
// analytic continuation of conj(g) off the real axis (coefficient swap)
cplx sample_g_star(const WalkParameters& p, ComplexPhasePoint w);

// one-parameter deformation of the pair; r = t^2 recovers (f, g).
// Rejects t = 0 (the deformation divides by t).
cplx sample_f_r(const WalkParameters& p, double r, ComplexPhasePoint w);
cplx sample_g_r(const WalkParameters& p, double r, ComplexPhasePoint w);
// coefficient-swapped partner of f_r: conj(f_r(x - i eps)) continued in x+i eps
cplx sample_f_r_swap(const WalkParameters& p, double r, ComplexPhasePoint w);
// normalization -k_r = sqrt(1 + r^2 + r^2/t^2 + t^2) (positive)
double perturbed_norm(const WalkParameters& p, double r);

// Verblunsky pairs (alpha_j, rho_j) on a window of CMV indices: even index 2n
// carries the constant shift pair, odd index 2n-1 the coin pair at phase
// theta + n*phi
struct CoefficientSequence {
  Interval window;
  std::vector<cplx> alphas;
  std::vector<cplx> rhos;

  cplx alpha(long j) const { return alphas[j - window.a]; }
  cplx rho(long j) const { return rhos[j - window.a]; }
  void set_alpha(long j, cplx v) { alphas[j - window.a] = v; }
  void set_rho(long j, cplx v) { rhos[j - window.a] = v; }
};

CoefficientSequence generate_coefficients(const WalkParameters& p,
                                          Interval window);

// same window with rho replaced by |rho| (the diagonal gauge fixes phases
// without touching alphas)
CoefficientSequence gauged_coefficients(const WalkParameters& p,
                                        Interval window);

// continued fraction phi = [a1, a2, ...] with convergents p_m / q_m
struct ContinuedFractionData {
  double phi = 0.0;
  std::vector<long long> partial_quotients;
  std::vector<long long> convergent_numers;  // p_1, p_2, ...
  std::vector<long long> convergent_denoms;  // q_1, q_2, ...

  // Diophantine exponent estimate 1 + max_m log q_{m+1} / log q_m,
  // clamped to [1.01, 10]
  double tau() const;
};

ContinuedFractionData continued_fraction(double phi, int depth);

// resonance scan: a phase theta is flagged when |sin 2 pi (theta + n phi)|
// falls under exp(-|n|^{1/(2 tau)}) for some half-integer n with |n| <= N
struct ResonanceReport {
  bool is_resonant_up_to_N = false;
  std::vector<double> witnesses;  // offending half-integers n
};

ResonanceReport resonance_test(const ContinuedFractionData& cf, double theta,
                               long N);

}  // namespace qwlab
