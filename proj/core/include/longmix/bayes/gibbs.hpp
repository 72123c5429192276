#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "longmix/design/design.hpp"
#include "longmix/numerics/matrix.hpp"
#include "longmix/numerics/rng.hpp"

namespace longmix {

// Conditionally conjugate priors: scaled Inv-chi2(a, b) on sigma_eps^2,
// Inv-chi2(c, d) on tau1^2, independent N(0, sigma_l^2) on each coefficient.
// The slope variant adds Inv-chi2(c2, d2) on tau2^2 (defaults follow c, d).
struct PriorHyperparams {
  double a = 0.01;
  double b = 1.0;
  double c = 0.01;
  double d = 1.0;
  std::vector<double> sigma_l_sq;  // empty = all 1e6; size 1 broadcasts
  std::optional<double> c2;
  std::optional<double> d2;

  void validate() const;
  std::vector<double> coefficient_prior_variances(std::size_t p) const;
  double slope_dof() const { return c2.value_or(c); }
  double slope_scale() const { return d2.value_or(d); }
};

struct GibbsState {
  std::vector<double> beta;
  std::vector<double> b1;  // per-subject random intercepts
  std::vector<double> b2;  // per-subject random slopes (empty without slope)
  double tau1_sq = 1.0;
  double tau2_sq = 1.0;  // ignored without slope
  double sigma_eps_sq = 1.0;
};

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;  // empirical quantiles, linear interpolation
  double q975 = 0.0;
  double ess = 0.0;
};

struct GibbsChain {
  std::vector<std::string> beta_labels;
  bool has_slope = false;
  std::size_t n_iter = 0;
  double burn_fraction = 0.0;
  std::uint64_t seed = 0;

  // Retained post-burn-in draws, one row per iteration.
  Matrix beta;  // S x p
  std::vector<double> tau1_sq;
  std::vector<double> tau2_sq;  // empty without slope
  std::vector<double> sigma_eps_sq;
  Matrix b1;  // S x n_subjects
  Matrix b2;  // S x n_subjects, 0x0 without slope

  std::vector<ParamSummary> summaries;  // betas, tau1_sq, (tau2_sq), sigma_eps_sq

  std::size_t n_retained() const { return sigma_eps_sq.size(); }
};

// Full-conditional updates. Each consumes randomness from `rng` and writes
// the sampled block back into `state`; everything else is read-only.
void cond_draw_b(GibbsState& state, const DesignMatrices& dm, const PriorHyperparams& priors,
                 RngState& rng);
void cond_draw_beta(GibbsState& state, const DesignMatrices& dm,
                    const PriorHyperparams& priors, RngState& rng);
void cond_draw_tau1_sq(GibbsState& state, const PriorHyperparams& priors, RngState& rng);
void cond_draw_tau2_sq(GibbsState& state, const PriorHyperparams& priors, RngState& rng);
void cond_draw_sigma_eps_sq(GibbsState& state, const DesignMatrices& dm,
                            const PriorHyperparams& priors, RngState& rng);

// Default initial state: beta from OLS, b = 0, both variances at the OLS
// residual variance.
GibbsState default_init(const DesignMatrices& dm);

// Sweeps b -> beta -> tau1^2 (-> tau2^2) -> sigma_eps^2, retaining the last
// floor(n_iter * (1 - burn_fraction)) states. Requires n_iter >= 100.
GibbsChain run_gibbs(const DesignMatrices& dm, const PriorHyperparams& priors,
                     std::size_t n_iter, double burn_fraction, std::uint64_t seed,
                     const std::optional<GibbsState>& init = std::nullopt);

}  // namespace longmix
