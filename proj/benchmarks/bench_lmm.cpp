#include <benchmark/benchmark.h>

#include "longmix/data/simulate.hpp"
#include "longmix/design/design.hpp"
#include "longmix/lmm/inference.hpp"

using namespace longmix;

namespace {

DesignMatrices design_for(std::size_t subjects, bool slope = false) {
  SimulationParams params;
  params.n_subjects = subjects;
  ModelSpec spec = ModelSpec::base_model();
  if (slope) spec.random_terms = {RandomTerm::Intercept, RandomTerm::GASlope};
  return build_design(simulate_cohort(default_truth(), params, 1).cohort, spec);
}

}  // namespace

static void BM_FitRandomIntercept(benchmark::State& state) {
  const DesignMatrices dm = design_for(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_lmm(dm, FitCriterion::REML));
}
BENCHMARK(BM_FitRandomIntercept)->Arg(88)->Arg(352);

static void BM_FitInterceptSlope(benchmark::State& state) {
  const DesignMatrices dm = design_for(static_cast<std::size_t>(state.range(0)), true);
  for (auto _ : state) benchmark::DoNotOptimize(fit_lmm(dm, FitCriterion::REML));
}
BENCHMARK(BM_FitInterceptSlope)->Arg(88);

static void BM_Satterthwaite(benchmark::State& state) {
  const DesignMatrices dm = design_for(88);
  const LmmFit fit = fit_lmm(dm, FitCriterion::REML);
  for (auto _ : state) benchmark::DoNotOptimize(satterthwaite_test(fit, dm, 1));
}
BENCHMARK(BM_Satterthwaite);

BENCHMARK_MAIN();
