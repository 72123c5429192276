#include "longmix/data/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "longmix/errors.hpp"
#include "longmix/numerics/rng.hpp"

namespace longmix {

namespace {

// Study category frequencies out of 88 subjects.
constexpr double kCtWeights[] = {45, 15, 13, 11, 4};
constexpr double kParityWeights[] = {35, 34, 11, 6, 2};
constexpr double kObHighProb = 28.0 / 88.0;

// Shifted lognormal for BMI: 15 + exp(N(mu, sigma)) has mean 24.56 and
// skewness 1.15 (sigma solves (w+2)^2(w-1) = 1.15^2 with w = exp(sigma^2)).
constexpr double kBmiShift = 15.0;
constexpr double kBmiLogMu = 2.194441;
constexpr double kBmiLogSigma = 0.355379;

double draw_truncated_normal(RngState& rng, double mean, double sd, double lo, double hi) {
  for (;;) {
    const double v = draw_normal(rng, mean, sd);
    if (v >= lo && v <= hi) return v;
  }
}

}  // namespace

SimulationTruth default_truth() {
  SimulationTruth t;
  t.beta = {1.750, 0.142, -0.088, 0.005, -0.021, -0.018, -0.093, 0.035, -0.076};
  t.tau1_sq = 0.40 * 0.40;
  t.sigma_eps_sq = 0.25 * 0.25;
  return t;
}

SimulatedCohort simulate_cohort(const SimulationTruth& truth, const SimulationParams& params,
                                std::uint64_t seed) {
  if (!(truth.tau1_sq >= 0.0) || !(truth.sigma_eps_sq >= 0.0))
    throw DomainError("simulate_cohort: negative variance");
  if (truth.beta.size() != 9)
    throw DomainError("simulate_cohort: beta must have 9 coefficients");
  if (params.n_subjects == 0) throw DomainError("simulate_cohort: no subjects");
  if (params.visits_min == 0 || params.visits_min > params.visits_max)
    throw DomainError("simulate_cohort: bad visits range");

  SimulatedCohort out;
  out.truth = truth;
  out.truth.seed = seed;
  out.truth.b1.clear();

  RngState rng(seed);
  const double tau1 = std::sqrt(truth.tau1_sq);
  const double sigma_eps = std::sqrt(truth.sigma_eps_sq);

  for (std::size_t i = 0; i < params.n_subjects; ++i) {
    Subject s;
    char id[16];
    std::snprintf(id, sizeof(id), "S%04zu", i + 1);
    s.id = id;

    s.ct_sum = static_cast<int>(draw_categorical(rng, kCtWeights));
    s.ob_risk = rng.next_uniform() < kObHighProb ? 1 : 0;
    s.parity = static_cast<int>(draw_categorical(rng, kParityWeights));
    s.bmi = kBmiShift + std::exp(draw_normal(rng, kBmiLogMu, kBmiLogSigma));
    s.cses = draw_truncated_normal(rng, 11.5, 2.2, 6.0, 17.0);
    s.dces = draw_truncated_normal(rng, 0.63, 0.35, 0.0, 2.37);

    const std::size_t span = params.visits_max - params.visits_min + 1;
    const std::size_t n_visits =
        params.visits_min + static_cast<std::size_t>(rng.next_uniform() * span);

    std::vector<double> gas(n_visits);
    for (;;) {
      for (auto& ga : gas) ga = draw_uniform(rng, kGaMin, kGaMax);
      std::sort(gas.begin(), gas.end());
      if (std::adjacent_find(gas.begin(), gas.end()) == gas.end()) break;
    }

    const double b1 = draw_normal(rng, 0.0, tau1);
    out.truth.b1.push_back(b1);

    for (double ga : gas) {
      double eta = truth.beta[0] + truth.beta[1] * ga + truth.beta[2] * s.ct_sum +
                   truth.beta[3] * s.ct_sum * ga + truth.beta[4] * s.bmi +
                   truth.beta[5] * s.cses + truth.beta[6] * s.dces +
                   truth.beta[7] * s.ob_risk + truth.beta[8] * s.parity;
      if (truth.hinge_beta) eta += *truth.hinge_beta * std::max(ga - truth.knot, 0.0);
      const double log_pcrh = eta + b1 + draw_normal(rng, 0.0, sigma_eps);
      s.visits.push_back({ga, std::exp(log_pcrh)});
    }
    out.cohort.subjects.push_back(std::move(s));
  }
  return out;
}

}  // namespace longmix
