#include <benchmark/benchmark.h>

#include "lanslab/apriori.hpp"
#include "lanslab/lans.hpp"
#include "lanslab/random_fields.hpp"

using namespace lanslab;

static void BM_LansRhs(benchmark::State& state) {
  const LansConfig cfg{0.3, 0.05, TorusGrid(3, static_cast<int>(state.range(0)))};
  const auto u = random_solenoidal(cfg.grid, 1, {.spectral_slope = 1.5});
  for (auto _ : state) benchmark::DoNotOptimize(lans_rhs(u, cfg));
}
BENCHMARK(BM_LansRhs)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_SolveLans(benchmark::State& state) {
  const LansConfig cfg{0.3, 0.05, TorusGrid(3, static_cast<int>(state.range(0)))};
  const auto u = random_solenoidal(cfg.grid, 2, {.spectral_slope = 1.5});
  for (auto _ : state) benchmark::DoNotOptimize(solve_lans(u, cfg, 0.01, 0.0025));
}
BENCHMARK(BM_SolveLans)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_CancellationCheck(benchmark::State& state) {
  const TorusGrid g(3, static_cast<int>(state.range(0)));
  const auto u = random_solenoidal(g, 3);
  for (auto _ : state) benchmark::DoNotOptimize(cancellation_check(u, 0.5));
}
BENCHMARK(BM_CancellationCheck)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
