// dynamics.hpp: exact wavepacket evolution inside the light cone and
// transport diagnostics (moment growth, return probability, spreading
// exponent) separating the dynamical regimes.
#pragma once

#include <vector>

#include "qwlab/gecmv.hpp"

namespace qwlab {

// initial spinor at the origin: a bare up component or the balanced mix
// (delta_0^+ + i delta_0^-)/sqrt(2)
enum class InitialSpinor { up, symmetric };

StateVector initial_state(InitialSpinor kind, long nmin, long nmax);

// trajectory summary at logarithmically spaced times
struct TransportRecord {
  std::vector<long> times;
  std::vector<double> second_moment;  // M2(T) = sum_n n^2 |psi_n(T)|^2
  std::vector<double> return_prob;    // |<psi(0), psi(T)>|^2
  double fitted_exponent = 0.0;       // beta from log M2 ~ 2 beta log T + c
  double fit_residual = 0.0;          // rms residual of that fit
  double norm_drift = 0.0;            // max | ||psi|| - 1 | along the way
};

// psi(T) = W^T psi(0). The window must extend at least T + 2 sites beyond
// the initial support on both sides so the light cone never reaches the
// edge; throws std::invalid_argument otherwise.
StateVector evolve(const WalkParameters& p, long T, const StateVector& initial);

// evolves from the origin with `checkpoints` log-spaced sample times up to
// T_max (>= 64) and fits the spreading exponent over the last decade
TransportRecord transport(const WalkParameters& p, long T_max,
                          int checkpoints = 60,
                          InitialSpinor kind = InitialSpinor::up);

}  // namespace qwlab
