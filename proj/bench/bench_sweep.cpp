#include <benchmark/benchmark.h>

#include <omp.h>

#include "ctrl_dos/analysis.hpp"

using namespace ctrl_dos;

namespace {

CanonicalSystem example3() {
  return to_canonical(LtiSystem(Matrix{{0, 1, 0}, {0, 0, 1}, {-3, -2, 3}}, Matrix{{0}, {0}, {1}}));
}

const std::vector<double>& grid() {
  static const std::vector<double> g = make_grid(10, 2000, 10);
  return g;
}

void BM_SweepSerial(benchmark::State& state) {
  const CanonicalSystem c = example3();
  const JammerProfile j(1.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(sweep_serial(c, j, 0.1, grid()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid().size()));
}

void BM_SweepOpenMP(benchmark::State& state) {
  const CanonicalSystem c = example3();
  const JammerProfile j(1.0, 0.1);
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(c, j, 0.1, grid()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid().size()));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepOpenMP)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
