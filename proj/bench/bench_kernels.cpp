// Serial reference kernels against their OpenMP versions. Thread count follows OMP_NUM_THREADS.

#include "curvstab/harmonics.hpp"
#include "curvstab/identity_checks.hpp"
#include "curvstab/stability_lab.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace curvstab;

namespace {

Execution policy(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

const char* label(const benchmark::State& state) { return state.range(0) == 0 ? "serial" : "parallel"; }

void BM_PairwiseSum(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(state.range(1)));
  for (double& x : v) x = u(rng);
  const Execution exec = policy(state);
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_sum(v, exec));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  state.SetLabel(label(state));
}
BENCHMARK(BM_PairwiseSum)->ArgsProduct({{0, 1}, {1 << 14, 1 << 20}});

RadialField bench_field(int n) {
  return RadialField(n, zonal_harmonic_unit_peak(n, 2).scaled(0.05) +
                            harmonic_library(n)[7].normalized.scaled(0.02));
}

void BM_DeficitNodes(benchmark::State& state) {
  const int n = 3;
  const QuadratureGrid grid = build_grid(n, default_resolution(n));
  const RadialField field = bench_field(n);
  const Execution exec = policy(state);
  for (auto _ : state) benchmark::DoNotOptimize(deficit_nodes(field, grid, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
  state.SetLabel(label(state));
}
BENCHMARK(BM_DeficitNodes)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BianchiResidual(benchmark::State& state) {
  const int n = 3;
  const QuadratureGrid grid = build_grid(n, {12});
  const RadialField field = bench_field(n);
  const Execution exec = policy(state);
  for (auto _ : state) benchmark::DoNotOptimize(bianchi_residual(field, grid, 2.0, "", exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
  state.SetLabel(label(state));
}
BENCHMARK(BM_BianchiResidual)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PhiMap(benchmark::State& state) {
  const int n = 3;
  const QuadratureGrid grid = build_grid(n, default_resolution(n));
  const LogRadius f = log_radius(bench_field(n));
  Vec c = Vec::Zero(n + 1);
  c[0] = 0.02;
  const Execution exec = policy(state);
  for (auto _ : state) benchmark::DoNotOptimize(phi_map(f, c, grid, exec));
  state.SetLabel(label(state));
}
BENCHMARK(BM_PhiMap)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
