#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "iwatsuka/eigensolve.hpp"
#include "iwatsuka/fiber.hpp"

namespace {

using namespace iwatsuka;

FiberMatrix harmonic(int n) {
  const GaugeFunction g(ConstantProfile{1.0});
  return assemble_fiber(g, ConstantProfile{0.0}, 0.0, GridSpec{-8.0, 8.0, n});
}

void BM_CountBelow(benchmark::State& state) {
  const FiberMatrix m = harmonic(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_below(m.diag, m.offdiag, 3.0));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CountBelow)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_LowestEigenvalues(benchmark::State& state) {
  const FiberMatrix m = harmonic(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lowest_eigenvalues(m.diag, m.offdiag, 3));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LowestEigenvalues)
    ->RangeMultiplier(4)
    ->Range(256, 65536)
    ->Complexity();

void BM_Eigenvector(benchmark::State& state) {
  const FiberMatrix m = harmonic(static_cast<int>(state.range(0)));
  const double lambda = lowest_eigenvalues(m.diag, m.offdiag, 1)[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigenvector(m.diag, m.offdiag, lambda));
  }
}
BENCHMARK(BM_Eigenvector)->RangeMultiplier(4)->Range(256, 16384);

void BM_DenseOracle(benchmark::State& state) {
  std::mt19937_64 eng(42);
  const int n = static_cast<int>(state.range(0));
  std::vector<double> d(n), e(n - 1);
  for (double& v : d)
    v = -10.0 + 20.0 * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
  for (double& v : e)
    v = -10.0 + 20.0 * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dense_oracle(d, e));
  }
}
BENCHMARK(BM_DenseOracle)->RangeMultiplier(2)->Range(8, 64);

}  // namespace
