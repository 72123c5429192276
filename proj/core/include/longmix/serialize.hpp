#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "longmix/bayes/model_check.hpp"
#include "longmix/data/describe.hpp"
#include "longmix/data/simulate.hpp"
#include "longmix/lmm/diagnostics.hpp"
#include "longmix/lmm/effects.hpp"
#include "longmix/lmm/inference.hpp"

namespace longmix {

// Every JSON document carries this version so downstream plotting scripts
// can detect layout changes.
inline constexpr int kSchemaVersion = 1;

// Coefficient table (estimate, se, df, t, p), variance components,
// log-likelihoods, and convergence metadata. `tests` must align with the
// fit's coefficients.
std::string fit_to_json(const LmmFit& fit, const std::vector<SatterthwaiteResult>& tests);

// Posterior mean + 95% interval per coefficient, then variance components.
std::string chain_summary_to_json(const GibbsChain& chain, std::optional<double> p_b);

// One row per retained iteration: iteration, each beta by label, tau1_sq,
// (tau2_sq,) sigma_eps_sq.
std::string chain_to_csv(const GibbsChain& chain);

// Per-subject random-effect draws, exported separately on request.
std::string chain_b_to_csv(const GibbsChain& chain, const std::vector<std::string>& subject_ids);

std::string diagnostics_acf_to_csv(const std::vector<ParamDiagnostics>& diags);

std::string residuals_to_csv(const std::vector<double>& fitted, const Series& pearson);

std::string qq_to_csv(const std::vector<std::pair<double, double>>& points);

std::string ppc_to_csv(const PpcResult& ppc);

std::string describe_to_json(const DescriptiveSummary& summary);

std::string truth_to_json(const SimulationTruth& truth, std::size_t n_subjects);

// Rows of exponentiated effects; point effects and piecewise weekly slopes
// share one layout with a `kind` discriminator.
std::string effects_to_csv(const std::vector<EffectReport>& points,
                           const std::vector<SlopeReport>& slopes);

}  // namespace longmix
