#pragma once

#include <string>
#include <vector>

#include "longmix/bayes/gibbs.hpp"
#include "longmix/design/design.hpp"
#include "longmix/numerics/rng.hpp"

namespace longmix {

// Conditional deviance -2 sum log N(y_r | X_r beta + Z_r b, sigma_eps^2).
double conditional_deviance(const std::vector<double>& beta, const std::vector<double>& b1,
                            const std::vector<double>& b2, double sigma_eps_sq,
                            const DesignMatrices& dm);

struct DicResult {
  double dic = 0.0;
  double p_d = 0.0;
  double mean_deviance = 0.0;
};

// DIC on the conditional likelihood: mean deviance plus p_D, where p_D is
// mean deviance minus the deviance at the posterior means of (beta, b,
// sigma_eps^2).
DicResult dic(const GibbsChain& chain, const DesignMatrices& dm);

struct PpcResult {
  double p_b = 0.0;  // fraction of draws with T(y_rep, theta) > T(y, theta)
  std::vector<double> observed;    // T(y, theta_s) per retained draw
  std::vector<double> replicated;  // T(y_rep, theta_s) per retained draw
};

// Posterior predictive check: per retained draw, simulate y_rep from the
// conditional model (that draw's b) and compare deviances. Requires at least
// 100 retained draws.
PpcResult posterior_predictive_pvalue(const GibbsChain& chain, const DesignMatrices& dm,
                                      RngState& rng);

struct ParamDiagnostics {
  std::string name;
  std::vector<double> trace;  // retained values in iteration order
  std::vector<double> acf;    // lags 0..50
  double ess = 0.0;
};

// Per-parameter trace, autocorrelation to lag 50, and effective sample size.
// Requires chain length > 50; a constant trace is a DegenerateInput.
std::vector<ParamDiagnostics> chain_diagnostics(const GibbsChain& chain);

}  // namespace longmix
