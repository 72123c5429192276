#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "longmix/data/cohort.hpp"

namespace longmix {

// Generating parameters for a synthetic cohort. `beta` is ordered as
// intercept, GA, CT-Sum, CT-Sum*GA, BMI, CSES, DCES, OB-risk, Parity.
// When hinge_beta is set the mean gains a max(GA - knot, 0) term.
struct SimulationTruth {
  std::vector<double> beta;
  std::optional<double> hinge_beta;
  double knot = 20.0;
  double tau1_sq = 0.0;      // random-intercept variance
  double sigma_eps_sq = 0.0; // residual variance
  std::vector<double> b1;    // realized per-subject intercepts (filled on simulation)
  std::uint64_t seed = 0;    // recorded on simulation
};

// Defaults anchored to the reference coefficient point: intercept 1.750,
// GA 0.142, CT-Sum -0.088, CT-Sum*GA 0.005, BMI -0.021, CSES -0.018,
// DCES -0.093, OB-risk 0.035, Parity -0.076; tau1 = 0.40, sigma_eps = 0.25.
SimulationTruth default_truth();

struct SimulationParams {
  std::size_t n_subjects = 88;
  std::size_t visits_min = 3;
  std::size_t visits_max = 5;
};

struct SimulatedCohort {
  Cohort cohort;
  SimulationTruth truth;  // input truth plus realized b1 and the seed
};

// Covariate marginals target the study's published category frequencies and
// moments; log(pcrh) is generated exactly as X*beta + b1_i + eps with
// b1_i ~ N(0, tau1_sq) and eps ~ N(0, sigma_eps_sq).
SimulatedCohort simulate_cohort(const SimulationTruth& truth, const SimulationParams& params,
                                std::uint64_t seed);

}  // namespace longmix
