#include "qwlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qwlab {

namespace {

// inclusive support bounds, or an empty interval for the zero vector
Interval support_of(const StateVector& psi) {
  long lo = psi.nmax() + 1, hi = psi.nmin - 1;
  for (long n = psi.nmin; n <= psi.nmax(); ++n) {
    if (std::abs(psi.plus[n - psi.nmin]) + std::abs(psi.minus[n - psi.nmin]) >
        0.0) {
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
  }
  return {lo, hi};
}

std::vector<long> log_spaced_times(long t_max, int count) {
  std::vector<long> out;
  const double lmax = std::log(static_cast<double>(t_max));
  for (int i = 0; i < count; ++i) {
    double u = (count == 1) ? 1.0 : static_cast<double>(i) / (count - 1);
    long t = std::lround(std::exp(u * lmax));
    t = std::clamp(t, 1L, t_max);
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  if (out.back() != t_max) out.push_back(t_max);
  return out;
}

}  // namespace

StateVector initial_state(InitialSpinor kind, long nmin, long nmax) {
  if (nmin > 0 || nmax < 0)
    throw std::invalid_argument("initial window must contain the origin");
  StateVector psi = StateVector::zeros(nmin, nmax);
  if (kind == InitialSpinor::up) {
    psi.plus[-nmin] = 1.0;
  } else {
    psi.plus[-nmin] = 1.0 / std::sqrt(2.0);
    psi.minus[-nmin] = cplx(0.0, 1.0 / std::sqrt(2.0));
  }
  return psi;
}

StateVector evolve(const WalkParameters& p, long T,
                   const StateVector& initial) {
  if (T < 0) throw std::invalid_argument("negative evolution time");
  if (T == 0) return initial;
  Interval sup = support_of(initial);
  if (sup.empty()) return initial;
  if (initial.nmin > sup.a - (T + 2) || initial.nmax() < sup.b + (T + 2))
    throw std::invalid_argument(
        "window too small: need T + 2 sites of margin beyond the initial "
        "support on both sides");
  CoinTable coins = make_coin_table(p, initial.nmin, initial.nmax());
  StateVector psi = initial;
  for (long step = 0; step < T; ++step) psi = walk_apply(p, coins, psi);
  return psi;
}

TransportRecord transport(const WalkParameters& p, long T_max, int checkpoints,
                          InitialSpinor kind) {
  if (T_max < 64) throw std::invalid_argument("transport needs T_max >= 64");
  if (checkpoints < 4)
    throw std::invalid_argument("transport needs at least 4 checkpoints");
  const long pad = T_max + 2;
  StateVector psi0 = initial_state(kind, -pad, pad);
  CoinTable coins = make_coin_table(p, -pad, pad);

  TransportRecord rec;
  rec.times = log_spaced_times(T_max, checkpoints);

  StateVector psi = psi0;
  std::size_t next = 0;
  for (long step = 1; step <= T_max && next < rec.times.size(); ++step) {
    psi = walk_apply(p, coins, psi);
    if (step != rec.times[next]) continue;
    double m2 = 0.0;
    for (long n = psi.nmin; n <= psi.nmax(); ++n) {
      double w = std::norm(psi.plus[n - psi.nmin]) +
                 std::norm(psi.minus[n - psi.nmin]);
      m2 += w * static_cast<double>(n) * static_cast<double>(n);
    }
    rec.second_moment.push_back(m2);
    rec.return_prob.push_back(std::norm(psi0.inner(psi)));
    rec.norm_drift = std::max(rec.norm_drift, std::abs(psi.norm() - 1.0));
    ++next;
  }

  // least squares log M2 ~ 2 beta log T + c over the last decade of times
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    if (rec.times[i] * 10 < T_max) continue;
    if (rec.second_moment[i] <= 0.0) continue;
    xs.push_back(std::log(static_cast<double>(rec.times[i])));
    ys.push_back(std::log(rec.second_moment[i]));
  }
  if (xs.size() >= 2) {
    double sx = std::accumulate(xs.begin(), xs.end(), 0.0);
    double sy = std::accumulate(ys.begin(), ys.end(), 0.0);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double n = static_cast<double>(xs.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - slope * sx) / n;
    rec.fitted_exponent = slope / 2.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double r = ys[i] - slope * xs[i] - icept;
      ss += r * r;
    }
    rec.fit_residual = std::sqrt(ss / n);
  }
  return rec;
}

}  // namespace qwlab
