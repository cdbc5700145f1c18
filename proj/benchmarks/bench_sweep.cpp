#include <benchmark/benchmark.h>

#include "iwatsuka/bands.hpp"

namespace {

using namespace iwatsuka;

void BM_FiberAssemble(benchmark::State& state) {
  const GaugeFunction g(StepProfile{1.0, 2.0, 0.0});
  const GridSpec grid{-10.0, 10.0, static_cast<int>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        assemble_fiber(g, ConstantProfile{0.0}, -5.0, grid));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FiberAssemble)->RangeMultiplier(4)->Range(1024, 65536)->Complexity();

void BM_StepSweep(benchmark::State& state) {
  const CatalogEntry* e = find_catalog_entry("iwatsuka-step");
  const FiberProblem p = make_problem(e->field, e->potential);
  const std::vector<double> xi =
      linspace(-20.0, 20.0, static_cast<int>(state.range(0)));
  SolverOptions opts;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep(p, xi, 2, opts));
  }
}
BENCHMARK(BM_StepSweep)->Arg(8)->Arg(32)->Arg(128);

void BM_StepSweepThreaded(benchmark::State& state) {
  const CatalogEntry* e = find_catalog_entry("iwatsuka-step");
  const FiberProblem p = make_problem(e->field, e->potential);
  const std::vector<double> xi = linspace(-20.0, 20.0, 128);
  SolverOptions opts;
  opts.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep(p, xi, 2, opts));
  }
}
BENCHMARK(BM_StepSweepThreaded)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void BM_SandwichCheck(benchmark::State& state) {
  const CatalogEntry* e = find_catalog_entry("iwatsuka-step");
  const FiberProblem p = make_problem(e->field, e->potential);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sandwich_check(p, -40.0, 0.1, 2));
  }
}
BENCHMARK(BM_SandwichCheck);

}  // namespace

BENCHMARK_MAIN();
