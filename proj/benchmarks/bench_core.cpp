// Hot-path benchmarks: cocycle iteration, truncation eigensolves, the
// componentwise walk step, and the two determinant routes.
#include <benchmark/benchmark.h>

#include "qwlab/dynamics.hpp"
#include "qwlab/lyapunov.hpp"
#include "qwlab/spectrum.hpp"

using namespace qwlab;

namespace {

WalkParameters bench_params() {
  return WalkParameters::make(0.45, 0.55, 0.5, golden_mean(), 0.137);
}

void BM_cocycle_iterate(benchmark::State& state) {
  const long n = state.range(0);
  CocycleMapSpec spec =
      CocycleMapSpec::two_step(bench_params(), std::polar(1.0, 1.1));
  for (auto _ : state) {
    IterateResult r = iterate(spec, 0.2, 0.0, n);
    benchmark::DoNotOptimize(r.log_scale);
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_finite_volume_spectrum(benchmark::State& state) {
  const long size = state.range(0);
  WalkParameters p = bench_params();
  Interval window{-size / 2, size / 2 - 1};
  BandedUnitary op =
      assemble(generate_coefficients(p, {window.a - 1, window.b + 1}), window,
               Boundary::closed());
  for (auto _ : state) {
    std::vector<cplx> ev = finite_volume_spectrum(op);
    benchmark::DoNotOptimize(ev.data());
  }
}

void BM_walk_apply(benchmark::State& state) {
  WalkParameters p = bench_params();
  const long pad = 2048;
  CoinTable coins = make_coin_table(p, -pad, pad);
  StateVector psi = initial_state(InitialSpinor::symmetric, -pad, pad);
  for (auto _ : state) {
    psi = walk_apply(p, coins, psi);
    benchmark::DoNotOptimize(psi.plus.data());
  }
  state.SetItemsProcessed(state.iterations() * (2 * pad + 1));
}

void BM_char_poly_product(benchmark::State& state) {
  WalkParameters p = bench_params();
  BandedUnitary raw = assemble(generate_coefficients(p, {-129, 128}),
                               {-128, 127}, Boundary::closed());
  auto [op, phases] = gauge_to_ecmv(raw);
  const cplx z = std::polar(0.9, 1.3);
  for (auto _ : state) {
    ScaledComplex d = char_poly_product(op, {-64, 63}, z);
    benchmark::DoNotOptimize(d.log_scale);
  }
}

void BM_lyapunov_estimate(benchmark::State& state) {
  const long n = state.range(0);
  WalkParameters p = bench_params();
  CocycleMapSpec spec = CocycleMapSpec::two_step(p, std::polar(1.0, 1.1));
  LyapunovBudget budget{n, 2, 0x5eed};
  for (auto _ : state) {
    LyapunovEstimate le = estimate_le(spec, 0.0, budget);
    benchmark::DoNotOptimize(le.value);
  }
  state.SetItemsProcessed(state.iterations() * n * budget.n_phases);
}

BENCHMARK(BM_cocycle_iterate)->Arg(1000)->Arg(10000);
BENCHMARK(BM_finite_volume_spectrum)->Arg(128)->Arg(256)->Arg(512)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_walk_apply);
BENCHMARK(BM_char_poly_product);
BENCHMARK(BM_lyapunov_estimate)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
