// Torus sweep: OpenMP kernel against the sequential reference.
#include <benchmark/benchmark.h>

#include "qgband/dispersion.hpp"
#include "qgband/graph.hpp"

using namespace qgband;

namespace {

const CompactGraph& graph() {
  static const CompactGraph g = build_gamma1({1.0, 1.1, 0.9, 1.05}, 0.0, 1.0);
  return g;
}

void bm_sweep_parallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    BandTable t = band_sweep(graph(), 1, 1.0, GridSpec{n, n, n}, 2);
    benchmark::DoNotOptimize(t.values.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}

void bm_sweep_serial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    BandTable t = band_sweep_serial(graph(), 1, 1.0, GridSpec{n, n, n}, 2);
    benchmark::DoNotOptimize(t.values.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}

}  // namespace

BENCHMARK(bm_sweep_parallel)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_sweep_serial)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
