// common.hpp: shared small types and numeric helpers for the walk laboratory.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qwlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// golden rotation number (sqrt(5)-1)/2, the default frequency everywhere
inline double golden_mean() { return 0.6180339887498948482045868343656381177; }

// closed integer interval [a, b] of lattice or matrix indices
struct Interval {
  long a = 0;
  long b = -1;  // empty by default
  long size() const { return b - a + 1; }
  bool empty() const { return b < a; }
  bool contains(long j) const { return a <= j && j <= b; }
};

// wrap to the fundamental domain [0, 1)
inline double wrap01(double x) {
  double y = x - std::floor(x);
  return (y >= 1.0) ? 0.0 : y;
}

// distance to the nearest integer
inline double dist_to_int(double x) {
  double y = x - std::round(x);
  return std::abs(y);
}

// complex value carried as mantissa * exp(log_scale); keeps long determinant
// and transfer products inside double range
struct ScaledComplex {
  cplx mantissa{1.0, 0.0};
  double log_scale = 0.0;

  static ScaledComplex from(cplx v) {
    ScaledComplex s;
    double a = std::abs(v);
    if (a == 0.0) {
      s.mantissa = 0.0;
      s.log_scale = 0.0;
    } else {
      s.mantissa = v / a;
      s.log_scale = std::log(a);
    }
    return s;
  }
  double log_abs() const {
    double a = std::abs(mantissa);
    return (a == 0.0) ? -std::numeric_limits<double>::infinity()
                      : log_scale + std::log(a);
  }
  cplx value() const { return mantissa * std::exp(log_scale); }
  ScaledComplex operator*(const ScaledComplex& o) const {
    ScaledComplex r;
    r.mantissa = mantissa * o.mantissa;
    r.log_scale = log_scale + o.log_scale;
    return r;
  }
};

// splitmix64: deterministic stream used for phase sampling and job splitting
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // uniform double in [0, 1)
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  // decorrelated child stream for job or cell `index`
  static SplitMix64 child(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mix(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    mix.next();
    return mix;
  }
};

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty vector");
  std::sort(v.begin(), v.end());
  size_t m = v.size() / 2;
  return (v.size() % 2 == 1) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// thrown when an evaluation hits the singular set (sampling function zero)
struct SingularSampleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qwlab
