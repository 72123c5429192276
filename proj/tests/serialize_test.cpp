#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "longmix/bayes/model_check.hpp"
#include "longmix/data/simulate.hpp"
#include "longmix/design/design.hpp"
#include "longmix/lmm/diagnostics.hpp"
#include "longmix/serialize.hpp"

using namespace longmix;
using nlohmann::json;

namespace {

struct Fixture {
  SimulatedCohort sim = simulate_cohort(default_truth(), {.n_subjects = 30}, 77);
  DesignMatrices dm = build_design(sim.cohort, ModelSpec::base_model());
  LmmFit fit = fit_lmm(dm, FitCriterion::REML);
};

}  // namespace

TEST_CASE("fit JSON carries the full coefficient table and metadata") {
  Fixture fx;
  std::vector<SatterthwaiteResult> tests;
  for (std::size_t j = 0; j < fx.fit.beta.size(); ++j)
    tests.push_back(satterthwaite_test(fx.fit, fx.dm, j));

  const json doc = json::parse(fit_to_json(fx.fit, tests));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["criterion"] == "reml");
  CHECK(doc["converged"] == true);
  REQUIRE(doc["coefficients"].size() == 9);
  const auto& ga = doc["coefficients"][1];
  CHECK(ga["term"] == "GA");
  CHECK(ga.contains("estimate"));
  CHECK(ga.contains("se"));
  CHECK(ga.contains("df"));
  CHECK(ga.contains("t"));
  CHECK(ga.contains("p"));
  CHECK(doc["variance_components"]["tau1_sq"].get<double>() > 0.0);
  CHECK(doc["variance_components"]["tau2_sq"].is_null());
  CHECK(doc["loglik"].contains("ml"));
  CHECK(doc["loglik"].contains("reml"));
}

TEST_CASE("chain CSV layout is iteration, betas, variances") {
  Fixture fx;
  const GibbsChain chain = run_gibbs(fx.dm, {}, 200, 0.2, 5);
  const std::string csv = chain_to_csv(chain);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "iteration,Intercept,GA,CT-Sum,CT-Sum:GA,BMI,CSES,DCES,OB-risk,Parity,"
        "tau1_sq,sigma_eps_sq");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == chain.n_retained());
}

TEST_CASE("chain summary JSON mirrors the posterior-interval table layout") {
  Fixture fx;
  const GibbsChain chain = run_gibbs(fx.dm, {}, 200, 0.2, 5);
  const json doc = json::parse(chain_summary_to_json(chain, 0.58));
  REQUIRE(doc["coefficients"].size() == 9);
  CHECK(doc["coefficients"][0].contains("mean"));
  CHECK(doc["coefficients"][0].contains("ci_lower"));
  CHECK(doc["coefficients"][0].contains("ci_upper"));
  CHECK(doc["variance_components"].size() == 2);
  CHECK(doc["ppc"]["p_b"] == 0.58);
}

TEST_CASE("serialization is deterministic") {
  Fixture fx;
  const GibbsChain chain = run_gibbs(fx.dm, {}, 200, 0.2, 5);
  CHECK(chain_to_csv(chain) == chain_to_csv(chain));
  const DescriptiveSummary d = describe(fx.sim.cohort);
  CHECK(describe_to_json(d) == describe_to_json(d));
  CHECK(truth_to_json(fx.sim.truth, 30) == truth_to_json(fx.sim.truth, 30));
}

TEST_CASE("effects CSV carries both point and slope rows") {
  std::vector<EffectReport> points = {effect_percent(-0.088, 0.005, 40.0, 1.0)};
  std::vector<SlopeReport> slopes = {
      piecewise_slope_percent(0.032, 0.127, 0.005, 1.2, GaSegment::Before),
      piecewise_slope_percent(0.032, 0.127, 0.005, 1.2, GaSegment::After)};
  const std::string csv = effects_to_csv(points, slopes);
  CHECK(csv.find("kind,ga,ct_delta,ct,segment,log_effect,percent") == 0);
  CHECK(csv.find("point,40,") != std::string::npos);
  CHECK(csv.find("weekly_slope,,,1.2") != std::string::npos);
  CHECK(csv.find(",before,") != std::string::npos);
  CHECK(csv.find(",after,") != std::string::npos);
}

TEST_CASE("describe JSON includes counts and quantitative summaries") {
  Fixture fx;
  const json doc = json::parse(describe_to_json(describe(fx.sim.cohort)));
  CHECK(doc["n_subjects"] == 30);
  REQUIRE(doc["ct_sum"].size() == 5);
  CHECK(doc["ct_sum"][0].contains("percent"));
  CHECK(doc["pcrh"].contains("skewness"));
}

TEST_CASE("qq and residual CSVs match their inputs row for row") {
  Fixture fx;
  const Series res = pearson_residuals(fx.fit, fx.dm);
  const std::vector<double> fitted = fitted_values(fx.fit, fx.dm);
  const std::string res_csv = residuals_to_csv(fitted, res);
  std::size_t lines = 0;
  for (char ch : res_csv) lines += ch == '\n';
  CHECK(lines == res.size() + 1);

  const auto pts = qq_points(res);
  const std::string qq_csv = qq_to_csv(pts);
  lines = 0;
  for (char ch : qq_csv) lines += ch == '\n';
  CHECK(lines == pts.size() + 1);
}
