#include <benchmark/benchmark.h>

#include "fracstab/functionals.hpp"
#include "fracstab/geometry.hpp"
#include "fracstab/pair_rule.hpp"
#include "fracstab/specfun.hpp"
#include "fracstab/sphere.hpp"

using namespace fracstab;

namespace {

SphereFunction sample_shape(int n, int K) {
  SphereFunction u(n, K);
  for (int k = 2; k <= K; ++k) u.coeff(k, 1) = 0.02 / (k * k);
  return u;
}

void BM_SpectralTable(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  double alpha = 0.3;
  for (auto _ : state) {
    // perturb the order so the memo cache never hits
    alpha = alpha < 0.7 ? alpha + 1e-9 : 0.3;
    benchmark::DoNotOptimize(spectral_table(5, alpha, K));
  }
}
BENCHMARK(BM_SpectralTable)->Arg(256)->Arg(2048);

void BM_AnalyzeSynthesize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int K = static_cast<int>(state.range(1));
  const SphereFunction u = sample_shape(n, K);
  const QuadratureGrid g = make_grid(n, n == 2 ? 4 * K : 2 * K + 2);
  for (auto _ : state) {
    auto s = synthesize(u, g);
    benchmark::DoNotOptimize(analyze(s, g, K));
  }
}
BENCHMARK(BM_AnalyzeSynthesize)->Args({2, 16})->Args({3, 8});

void BM_PairRule(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int res = static_cast<int>(state.range(1));
  double alpha = 0.3;
  for (auto _ : state) {
    alpha = alpha < 0.7 ? alpha + 1e-9 : 0.3;
    benchmark::DoNotOptimize(pair_rule(n, alpha, res));
  }
}
BENCHMARK(BM_PairRule)->Args({2, 128})->Args({3, 16})->Unit(benchmark::kMillisecond);

void BM_Perimeter(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int K = static_cast<int>(state.range(1));
  const NearlySphericalSet E(sample_shape(n, K));
  QuadratureOptions opt;
  opt.estimate_error = false;
  for (auto _ : state) benchmark::DoNotOptimize(fractional_perimeter(E, 0.5, opt));
}
BENCHMARK(BM_Perimeter)->Args({2, 8})->Args({3, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
