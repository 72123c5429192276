#include <benchmark/benchmark.h>

#include <random>

#include "longmix/numerics/matrix.hpp"
#include "longmix/numerics/rng.hpp"
#include "longmix/numerics/special.hpp"

using namespace longmix;

static void BM_Cholesky(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937 gen(5);
  std::normal_distribution<double> nd;
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = nd(gen);
  Matrix a(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) a(i, j) += b(i, k) * b(j, k);
      if (i == j) a(i, j) += static_cast<double>(n);
    }
  for (auto _ : state) benchmark::DoNotOptimize(cholesky(a));
}
BENCHMARK(BM_Cholesky)->Arg(9)->Arg(50);

static void BM_Chi2Survival(benchmark::State& state) {
  double x = 0.0;
  for (auto _ : state) {
    x += 0.001;
    if (x > 40.0) x = 0.001;
    benchmark::DoNotOptimize(chi2_survival(x, 2.0));
  }
}
BENCHMARK(BM_Chi2Survival);

static void BM_ScaledInvChi2Draw(benchmark::State& state) {
  RngState rng(11);
  for (auto _ : state) benchmark::DoNotOptimize(draw_scaled_inv_chi2(rng, 90.0, 0.01));
}
BENCHMARK(BM_ScaledInvChi2Draw);

BENCHMARK_MAIN();
