#include <benchmark/benchmark.h>

#include "lanslab/littlewood_paley.hpp"
#include "lanslab/random_fields.hpp"
#include "lanslab/spectral.hpp"

using namespace lanslab;

static void BM_InverseForward(benchmark::State& state) {
  const TorusGrid g(3, static_cast<int>(state.range(0)));
  const auto u = random_solenoidal(g, 1);
  for (auto _ : state) benchmark::DoNotOptimize(forward_transform(inverse_transform(u)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.num_points()));
}
BENCHMARK(BM_InverseForward)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_LerayProject(benchmark::State& state) {
  const TorusGrid g(3, static_cast<int>(state.range(0)));
  const auto u = gradient(random_scalar(g, 2));
  for (auto _ : state) benchmark::DoNotOptimize(leray_project(u));
}
BENCHMARK(BM_LerayProject)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_BesovNorm(benchmark::State& state) {
  const TorusGrid g(3, static_cast<int>(state.range(0)));
  const DyadicPartition part(g);
  const auto u = random_solenoidal(g, 3, {.spectral_slope = 1.0});
  const BesovIndex idx{1.5, static_cast<double>(state.range(1)), 2.0};
  for (auto _ : state) benchmark::DoNotOptimize(besov_norm(u, idx, part));
}
BENCHMARK(BM_BesovNorm)->Args({32, 2})->Args({32, 6})->Args({64, 2})->Args({64, 6})->Unit(benchmark::kMillisecond);

static void BM_Paraproduct(benchmark::State& state) {
  const TorusGrid g(3, static_cast<int>(state.range(0)));
  const DyadicPartition part(g);
  const auto f = random_scalar(g, 4), h = random_scalar(g, 5);
  for (auto _ : state) benchmark::DoNotOptimize(paraproduct_split(f, h, part));
}
BENCHMARK(BM_Paraproduct)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
