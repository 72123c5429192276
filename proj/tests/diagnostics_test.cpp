#include <doctest.h>

#include <cmath>

#include "longmix/data/simulate.hpp"
#include "longmix/design/design.hpp"
#include "longmix/errors.hpp"
#include "longmix/lmm/diagnostics.hpp"
#include "longmix/numerics/rng.hpp"
#include "longmix/numerics/series.hpp"
#include "longmix/numerics/special.hpp"

using namespace longmix;

TEST_CASE("noise-free data gives residuals at zero") {
  SimulationTruth t = default_truth();
  t.tau1_sq = 0.0;
  t.sigma_eps_sq = 0.0;
  const SimulatedCohort sim = simulate_cohort(t, {.n_subjects = 30}, 4);
  const DesignMatrices dm = build_design(sim.cohort, ModelSpec::base_model());
  const LmmFit fit = fit_lmm(dm, FitCriterion::REML);
  for (double r : pearson_residuals(fit, dm)) CHECK(std::fabs(r) < 1e-9);
}

TEST_CASE("well-specified residuals are standardized and patternless") {
  // enough visits per subject that BLUP shrinkage leaves the conditional
  // residual scale close to sigma
  const SimulatedCohort sim = simulate_cohort(
      default_truth(), {.n_subjects = 60, .visits_min = 8, .visits_max = 10}, 18);
  const DesignMatrices dm = build_design(sim.cohort, ModelSpec::base_model());
  const LmmFit fit = fit_lmm(dm, FitCriterion::REML);
  const Series res = pearson_residuals(fit, dm);
  REQUIRE(res.size() >= 300);

  CHECK(std::fabs(mean(res)) < 0.05);
  const double sd = std::sqrt(variance(res));
  CHECK(sd > 0.9);
  CHECK(sd < 1.1);

  // no trend against fitted values
  const std::vector<double> fitted = fitted_values(fit, dm);
  const double mf = mean(fitted), mr = mean(res);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    sxy += (fitted[i] - mf) * (res[i] - mr);
    sxx += (fitted[i] - mf) * (fitted[i] - mf);
    syy += (res[i] - mr) * (res[i] - mr);
  }
  CHECK(std::fabs(sxy / std::sqrt(sxx * syy)) < 0.1);
}

TEST_CASE("qq_points uses the (i - 0.5)/n plotting positions") {
  const auto pts = qq_points(Series{0.0, -1.0, 1.0});
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].second == -1.0);
  CHECK(pts[1].second == 0.0);
  CHECK(pts[2].second == 1.0);
  CHECK(normal_cdf(pts[0].first) == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
  CHECK(normal_cdf(pts[1].first) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(normal_cdf(pts[2].first) == doctest::Approx(5.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("qq slope of a standard normal sample is near one") {
  RngState rng(77);
  Series s(1000);
  for (auto& v : s) v = draw_normal(rng, 0.0, 1.0);
  const auto pts = qq_points(s);

  double sx = 0, sy = 0, sxy = 0, sxx = 0;
  for (const auto& [t, e] : pts) {
    sx += t;
    sy += e;
    sxy += t * e;
    sxx += t * t;
  }
  const double n = static_cast<double>(pts.size());
  const double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
  CHECK(slope > 0.92);
  CHECK(slope < 1.08);
}

TEST_CASE("qq_points rejects constant input") {
  CHECK_THROWS_AS(qq_points(Series{1.0, 1.0, 1.0, 1.0}), DegenerateInput);
  CHECK_THROWS_AS(qq_points(Series{1.0, 2.0}), DegenerateInput);
}
