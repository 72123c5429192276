#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "longmix/design/design.hpp"
#include "longmix/numerics/matrix.hpp"

namespace longmix {

enum class FitCriterion { ML, REML };

// Variance parameters of the marginal model V_i = Z_i G Z_i^T + sigma^2 I.
// tau2_sq/tau12 are present exactly when the model has a random GA slope.
struct VarianceComponents {
  double tau1_sq = 0.0;
  std::optional<double> tau2_sq;
  std::optional<double> tau12;
  double sigma_eps_sq = 0.0;
};

struct LmmFit {
  ModelSpec spec;
  FitCriterion criterion = FitCriterion::REML;
  std::vector<std::string> labels;
  std::vector<double> beta;  // GLS estimates at the fitted variance components
  VarianceComponents vc;
  Matrix cov_beta;     // (X^T V^-1 X)^-1 at the fit
  double loglik_ml = 0.0;    // ML criterion evaluated at the fitted vc
  double loglik_reml = 0.0;  // REML criterion evaluated at the fitted vc
  Matrix blups;        // n_subjects x q predicted random effects
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t n_obs = 0;
  std::size_t n_subjects = 0;
};

// Gaussian marginal log-likelihood with beta profiled out by GLS, computed
// exactly from per-subject dense blocks. REML subtracts log|X^T V^-1 X| / 2
// and swaps N for N - p in the 2*pi constant.
double profile_loglik(const DesignMatrices& dm, const VarianceComponents& vc,
                      FitCriterion criterion);

// X^T V^-1 X at the given variance components (same block route).
Matrix gls_information(const DesignMatrices& dm, const VarianceComponents& vc);

// Maximize the chosen criterion over the variance components. The
// random-intercept model profiles sigma^2 and optimizes the single ratio
// tau1^2/sigma^2 on a log scale (grid bracket, golden section, Newton
// polish); the intercept+slope model optimizes a 3-parameter log-Cholesky
// factor by Nelder-Mead with restarts, plus the exact tau2=0 boundary
// candidate so the slope fit can never fall below the nested intercept fit.
// An exhausted iteration budget is reported through converged = false,
// never silently.
LmmFit fit_lmm(const DesignMatrices& dm, FitCriterion criterion,
               std::size_t max_iterations = 500);

}  // namespace longmix
