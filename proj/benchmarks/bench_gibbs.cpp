#include <benchmark/benchmark.h>

#include "longmix/bayes/model_check.hpp"
#include "longmix/data/simulate.hpp"
#include "longmix/design/design.hpp"

using namespace longmix;

namespace {

DesignMatrices default_design() {
  return build_design(simulate_cohort(default_truth(), {}, 1).cohort,
                      ModelSpec::base_model());
}

}  // namespace

static void BM_GibbsChain(benchmark::State& state) {
  const DesignMatrices dm = default_design();
  const std::size_t iters = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(run_gibbs(dm, {}, iters, 0.2, 7));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(iters));
}
BENCHMARK(BM_GibbsChain)->Arg(1000)->Arg(10000);

static void BM_PosteriorPredictive(benchmark::State& state) {
  const DesignMatrices dm = default_design();
  const GibbsChain chain = run_gibbs(dm, {}, 1000, 0.2, 7);
  for (auto _ : state) {
    RngState rng(3);
    benchmark::DoNotOptimize(posterior_predictive_pvalue(chain, dm, rng));
  }
}
BENCHMARK(BM_PosteriorPredictive);

BENCHMARK_MAIN();
