#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "longmix/bayes/gibbs.hpp"
#include "longmix/data/simulate.hpp"
#include "longmix/design/design.hpp"
#include "longmix/errors.hpp"
#include "longmix/numerics/series.hpp"

using namespace longmix;

namespace {

// Minimal hand-built design: one intercept column, given subject sizes and
// responses, GA as the slope regressor when slope = true.
DesignMatrices manual_design(const std::vector<std::vector<double>>& subject_y,
                             bool slope = false) {
  DesignMatrices dm;
  dm.spec.fixed_terms = {FixedTerm::Intercept};
  dm.spec.random_terms = {RandomTerm::Intercept};
  if (slope) dm.spec.random_terms.push_back(RandomTerm::GASlope);
  dm.labels = {"Intercept"};
  std::size_t n = 0;
  for (const auto& g : subject_y) n += g.size();
  dm.x = Matrix(n, 1, 1.0);
  std::size_t row = 0;
  for (std::size_t i = 0; i < subject_y.size(); ++i) {
    const std::size_t begin = row;
    for (double v : subject_y[i]) {
      dm.y.push_back(v);
      dm.ga.push_back(15.0 + 6.0 * static_cast<double>(row - begin));
      dm.subject_of_row.push_back(i);
      ++row;
    }
    dm.subject_rows.emplace_back(begin, row);
    dm.subject_ids.push_back("S" + std::to_string(i));
  }
  return dm;
}

GibbsState state_for(const DesignMatrices& dm, double beta0, double tau1_sq,
                     double sigma_eps_sq) {
  GibbsState s;
  s.beta.assign(dm.n_fixed(), beta0);
  s.b1.assign(dm.n_subjects(), 0.0);
  if (dm.random_slope()) s.b2.assign(dm.n_subjects(), 0.0);
  s.tau1_sq = tau1_sq;
  s.sigma_eps_sq = sigma_eps_sq;
  return s;
}

}  // namespace

TEST_CASE("b conditional: one visit, unit variances, residual 2 gives mean 1 and variance 1/2") {
  const DesignMatrices dm = manual_design({{2.0}, {2.0}});
  const PriorHyperparams priors;
  RngState rng(7);

  std::vector<double> draws;
  for (int k = 0; k < 100000; ++k) {
    GibbsState s = state_for(dm, 0.0, 1.0, 1.0);
    cond_draw_b(s, dm, priors, rng);
    draws.push_back(s.b1[0]);
  }
  CHECK(mean(draws) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(variance(draws) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("b conditional shrinks to zero as tau1_sq vanishes") {
  const DesignMatrices dm = manual_design({{2.0, 1.5, 2.5}, {1.0, 0.5}});
  const PriorHyperparams priors;
  RngState rng(11);
  GibbsState s = state_for(dm, 0.0, 1e-12, 1.0);
  cond_draw_b(s, dm, priors, rng);
  for (double b : s.b1) CHECK(std::fabs(b) < 1e-4);
}

TEST_CASE("b conditional matches the closed form for a three-visit subject") {
  const DesignMatrices dm = manual_design({{1.0, 2.0, 3.0}});
  const PriorHyperparams priors;
  const double beta0 = 0.5, tau = 0.7, sigma = 0.3;
  RngState rng(13);

  std::vector<double> draws;
  for (int k = 0; k < 100000; ++k) {
    GibbsState s = state_for(dm, beta0, tau, sigma);
    cond_draw_b(s, dm, priors, rng);
    draws.push_back(s.b1[0]);
  }
  const double resid_sum = (1.0 - beta0) + (2.0 - beta0) + (3.0 - beta0);
  const double prec = 3.0 / sigma + 1.0 / tau;
  const double want_mean = (resid_sum / sigma) / prec;
  const double want_var = 1.0 / prec;
  CHECK(mean(draws) == doctest::Approx(want_mean).epsilon(0.01));
  CHECK(variance(draws) == doctest::Approx(want_var).epsilon(0.01));
}

TEST_CASE("beta conditional: flat prior limit recovers the adjusted-response mean") {
  const DesignMatrices dm = manual_design({{1.2, 0.8}, {1.6, 2.0}});
  PriorHyperparams priors;
  priors.sigma_l_sq = {1e12};
  RngState rng(17);

  GibbsState base = state_for(dm, 0.0, 1.0, 1.0);
  base.b1 = {0.25, -0.5};
  const double adj_mean = ((1.2 - 0.25) + (0.8 - 0.25) + (1.6 + 0.5) + (2.0 + 0.5)) / 4.0;

  std::vector<double> draws;
  for (int k = 0; k < 50000; ++k) {
    GibbsState s = base;
    cond_draw_beta(s, dm, priors, rng);
    draws.push_back(s.beta[0]);
  }
  CHECK(mean(draws) == doctest::Approx(adj_mean).epsilon(0.02));
}

TEST_CASE("beta conditional: point-mass prior pins the coefficient at zero") {
  const DesignMatrices dm = manual_design({{1.2, 0.8}, {1.6, 2.0}});
  PriorHyperparams priors;
  priors.sigma_l_sq = {1e-12};
  RngState rng(19);
  GibbsState s = state_for(dm, 5.0, 1.0, 1.0);
  cond_draw_beta(s, dm, priors, rng);
  CHECK(std::fabs(s.beta[0]) < 1e-4);
}

TEST_CASE("beta conditional mean matches the dense two-coefficient computation") {
  // n=3 rows, p=2 columns, one subject with b1 = 0.3
  DesignMatrices dm = manual_design({{1.0, 2.2, 3.1}});
  dm.spec.fixed_terms = {FixedTerm::Intercept, FixedTerm::GA};
  dm.labels = {"Intercept", "GA"};
  dm.x = Matrix(3, 2);
  const double xs[3][2] = {{1.0, 0.0}, {1.0, 1.0}, {1.0, 2.0}};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 2; ++c) dm.x(r, c) = xs[r][c];

  PriorHyperparams priors;
  priors.sigma_l_sq = {2.0, 3.0};
  const double sigma = 0.5, b1 = 0.3;

  // dense formula: P = X^T X / sigma^2 + diag(1/2, 1/3), mean = P^-1 X^T ytil / sigma^2
  double xtx[2][2] = {{3.0, 3.0}, {3.0, 5.0}};
  double p00 = xtx[0][0] / sigma + 1.0 / 2.0;
  double p01 = xtx[0][1] / sigma;
  double p11 = xtx[1][1] / sigma + 1.0 / 3.0;
  const double ytil[3] = {1.0 - b1, 2.2 - b1, 3.1 - b1};
  double h0 = (ytil[0] + ytil[1] + ytil[2]) / sigma;
  double h1 = (0.0 * ytil[0] + 1.0 * ytil[1] + 2.0 * ytil[2]) / sigma;
  const double det = p00 * p11 - p01 * p01;
  const double want0 = (p11 * h0 - p01 * h1) / det;
  const double want1 = (-p01 * h0 + p00 * h1) / det;

  RngState rng(23);
  std::vector<double> d0, d1;
  for (int k = 0; k < 100000; ++k) {
    GibbsState s = state_for(dm, 0.0, 1.0, sigma);
    s.b1 = {b1};
    cond_draw_beta(s, dm, priors, rng);
    d0.push_back(s.beta[0]);
    d1.push_back(s.beta[1]);
  }
  CHECK(mean(d0) == doctest::Approx(want0).epsilon(0.01));
  CHECK(mean(d1) == doctest::Approx(want1).epsilon(0.01));
  // covariance should match P^-1 as well
  CHECK(variance(d0) == doctest::Approx(p11 / det).epsilon(0.03));
  CHECK(variance(d1) == doctest::Approx(p00 / det).epsilon(0.03));
}

TEST_CASE("tau1_sq conditional with zero effects matches the prior-updated moment") {
  std::vector<std::vector<double>> ys(88, std::vector<double>{1.0});
  const DesignMatrices dm = manual_design(ys);
  PriorHyperparams priors;
  priors.c = 1.0;
  priors.d = 1.0;
  RngState rng(29);

  std::vector<double> draws;
  for (int k = 0; k < 100000; ++k) {
    GibbsState s = state_for(dm, 0.0, 1.0, 1.0);
    cond_draw_tau1_sq(s, priors, rng);
    draws.push_back(s.tau1_sq);
  }
  // Inv-chi2(89, 1/89): mean = 89 * (1/89) / 87
  CHECK(mean(draws) == doctest::Approx(1.0 / 87.0).epsilon(0.01));
}

TEST_CASE("tau1_sq conditional concentrates at d under a dogmatic prior") {
  const DesignMatrices dm = manual_design({{1.0}, {2.0}});
  PriorHyperparams priors;
  priors.c = 1e9;
  priors.d = 0.37;
  RngState rng(31);
  GibbsState s = state_for(dm, 0.0, 1.0, 1.0);
  s.b1 = {0.4, -0.2};
  for (int k = 0; k < 50; ++k) {
    cond_draw_tau1_sq(s, priors, rng);
    CHECK(s.tau1_sq == doctest::Approx(0.37).epsilon(0.01));
  }
}

TEST_CASE("doubling the squared effects stochastically increases tau1_sq") {
  const DesignMatrices dm = manual_design({{1.0}, {2.0}, {3.0}, {4.0}});
  const PriorHyperparams priors;
  RngState rng(37);

  auto median_of = [&](const std::vector<double>& b_vals) {
    std::vector<double> draws;
    for (int k = 0; k < 100000; ++k) {
      GibbsState s = state_for(dm, 0.0, 1.0, 1.0);
      s.b1 = b_vals;
      cond_draw_tau1_sq(s, priors, rng);
      draws.push_back(s.tau1_sq);
    }
    return quantile(draws, 0.5);
  };
  const double base = median_of({0.5, -0.5, 0.3, -0.3});
  const double doubled = median_of({0.5 * std::sqrt(2.0), -0.5 * std::sqrt(2.0),
                                    0.3 * std::sqrt(2.0), -0.3 * std::sqrt(2.0)});
  CHECK(doubled > base);
}

TEST_CASE("sigma_eps_sq conditional at zero residuals matches the prior-updated moment") {
  std::vector<std::vector<double>> ys(100, std::vector<double>(3, 0.5));
  const DesignMatrices dm = manual_design(ys);  // N = 300
  PriorHyperparams priors;
  priors.a = 1.0;
  priors.b = 1.0;
  RngState rng(41);

  std::vector<double> draws;
  for (int k = 0; k < 100000; ++k) {
    GibbsState s = state_for(dm, 0.5, 1.0, 1.0);  // beta = y: zero residuals
    cond_draw_sigma_eps_sq(s, dm, priors, rng);
    draws.push_back(s.sigma_eps_sq);
  }
  // Inv-chi2(301, 1/301): mean = 1/299
  CHECK(mean(draws) == doctest::Approx(1.0 / 299.0).epsilon(0.01));
}

TEST_CASE("sigma_eps_sq conditional concentrates near the mean squared residual") {
  // residual sum of squares = N with a negligible prior weight
  std::vector<std::vector<double>> ys(120, std::vector<double>(3, 1.0));
  const DesignMatrices dm = manual_design(ys);
  PriorHyperparams priors;
  priors.a = 1e-6;
  priors.b = 1.0;
  RngState rng(43);

  std::vector<double> draws;
  for (int k = 0; k < 20000; ++k) {
    GibbsState s = state_for(dm, 0.0, 1.0, 1.0);  // every residual is 1
    cond_draw_sigma_eps_sq(s, dm, priors, rng);
    draws.push_back(s.sigma_eps_sq);
  }
  CHECK(mean(draws) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("conditional draws are deterministic under a fixed seed") {
  const DesignMatrices dm = manual_design({{1.0, 2.0}, {0.5}});
  const PriorHyperparams priors;
  RngState r1(99), r2(99);
  GibbsState s1 = state_for(dm, 0.3, 0.8, 0.6);
  GibbsState s2 = state_for(dm, 0.3, 0.8, 0.6);
  for (int k = 0; k < 20; ++k) {
    cond_draw_b(s1, dm, priors, r1);
    cond_draw_b(s2, dm, priors, r2);
    cond_draw_sigma_eps_sq(s1, dm, priors, r1);
    cond_draw_sigma_eps_sq(s2, dm, priors, r2);
    CHECK(s1.b1 == s2.b1);
    CHECK(s1.sigma_eps_sq == s2.sigma_eps_sq);
  }
}

TEST_CASE("run_gibbs retains floor(n_iter (1 - burn)) strictly positive draws") {
  const SimulatedCohort sim = simulate_cohort(default_truth(), {.n_subjects = 20}, 3);
  const DesignMatrices dm = build_design(sim.cohort, ModelSpec::base_model());
  const GibbsChain chain = run_gibbs(dm, {}, 501, 0.2, 5);
  CHECK(chain.n_retained() == 400);  // floor(501 * 0.8)
  for (std::size_t s = 0; s < chain.n_retained(); ++s) {
    CHECK(chain.tau1_sq[s] > 0.0);
    CHECK(chain.sigma_eps_sq[s] > 0.0);
  }
}

TEST_CASE("run_gibbs is reproducible for equal seeds") {
  const SimulatedCohort sim = simulate_cohort(default_truth(), {.n_subjects = 20}, 3);
  const DesignMatrices dm = build_design(sim.cohort, ModelSpec::base_model());
  const GibbsChain a = run_gibbs(dm, {}, 300, 0.2, 11);
  const GibbsChain b = run_gibbs(dm, {}, 300, 0.2, 11);
  CHECK(a.beta.entries() == b.beta.entries());
  CHECK(a.tau1_sq == b.tau1_sq);
  CHECK(a.sigma_eps_sq == b.sigma_eps_sq);
}

TEST_CASE("run_gibbs validates its arguments") {
  const SimulatedCohort sim = simulate_cohort(default_truth(), {.n_subjects = 20}, 3);
  const DesignMatrices dm = build_design(sim.cohort, ModelSpec::base_model());
  CHECK_THROWS_AS(run_gibbs(dm, {}, 50, 0.2, 1), DomainError);
  CHECK_THROWS_AS(run_gibbs(dm, {}, 200, 1.0, 1), DomainError);
  CHECK_THROWS_AS(run_gibbs(dm, {}, 100, 0.999, 1), DomainError);  // nothing retained
  PriorHyperparams bad;
  bad.a = -1.0;
  CHECK_THROWS_AS(run_gibbs(dm, bad, 200, 0.2, 1), DomainError);
}

TEST_CASE("conjugate degenerate chain matches the normal-normal posterior") {
  // tau pinned near zero by a dogmatic prior, sigma pinned at 0.25 by another,
  // intercept-only model: the beta posterior has the closed normal-normal form.
  std::vector<std::vector<double>> ys;
  RngState gen(55);
  const double mu_true = 1.4, sigma_true = 0.5;
  for (int i = 0; i < 30; ++i) {
    std::vector<double> g;
    for (int j = 0; j < 3; ++j) g.push_back(draw_normal(gen, mu_true, sigma_true));
    ys.push_back(g);
  }
  const DesignMatrices dm = manual_design(ys);

  PriorHyperparams priors;
  priors.c = 1e9;
  priors.d = 1e-10;  // tau1_sq ~ 0
  priors.a = 1e9;
  priors.b = sigma_true * sigma_true;  // sigma_eps_sq ~ 0.25
  priors.sigma_l_sq = {4.0};

  const GibbsChain chain = run_gibbs(dm, priors, 4000, 0.25, 77);

  const double n = static_cast<double>(dm.n_obs());
  double ybar = 0.0;
  for (double v : dm.y) ybar += v;
  ybar /= n;
  const double s2 = sigma_true * sigma_true;
  const double post_prec = n / s2 + 1.0 / 4.0;
  const double want_mean = (n * ybar / s2) / post_prec;
  const double want_sd = std::sqrt(1.0 / post_prec);

  const ParamSummary& beta = chain.summaries[0];
  const double mc_se = want_sd / std::sqrt(beta.ess);
  CHECK(std::fabs(beta.mean - want_mean) < 2.0 * mc_se);
  CHECK(beta.sd == doctest::Approx(want_sd).epsilon(0.1));
}

TEST_CASE("chain summaries are stable under subject relabeling") {
  const SimulatedCohort sim = simulate_cohort(default_truth(), {.n_subjects = 44}, 9);
  const DesignMatrices dm = build_design(sim.cohort, ModelSpec::base_model());
  const GibbsChain a = run_gibbs(dm, {}, 4000, 0.2, 3);

  Cohort shuffled = sim.cohort;
  std::reverse(shuffled.subjects.begin(), shuffled.subjects.end());
  const DesignMatrices dm2 = build_design(shuffled, ModelSpec::base_model());
  const GibbsChain b = run_gibbs(dm2, {}, 4000, 0.2, 3);

  for (std::size_t k = 0; k < a.summaries.size(); ++k) {
    const double se = a.summaries[k].sd / std::sqrt(a.summaries[k].ess) +
                      b.summaries[k].sd / std::sqrt(b.summaries[k].ess);
    CHECK(std::fabs(a.summaries[k].mean - b.summaries[k].mean) < 4.0 * se + 1e-12);
  }
}

TEST_CASE("bivariate b conditional matches the dense two-by-two closed form") {
  DesignMatrices dm = manual_design({{1.0, 2.5}}, true);
  // rows for the single subject carry ga = 15 and 21
  REQUIRE(dm.ga[0] == 15.0);
  REQUIRE(dm.ga[1] == 21.0);
  const PriorHyperparams priors;
  const double beta0 = 0.4, tau1 = 0.6, tau2 = 0.05, sigma = 0.3;

  // precision P = Z^T Z / sigma^2 + diag(1/tau1, 1/tau2), h = Z^T resid / sigma^2
  const double r0 = 1.0 - beta0, r1 = 2.5 - beta0;
  const double p00 = 2.0 / sigma + 1.0 / tau1;
  const double p01 = (15.0 + 21.0) / sigma;
  const double p11 = (15.0 * 15.0 + 21.0 * 21.0) / sigma + 1.0 / tau2;
  const double h0 = (r0 + r1) / sigma;
  const double h1 = (15.0 * r0 + 21.0 * r1) / sigma;
  const double det = p00 * p11 - p01 * p01;
  const double want_b1 = (p11 * h0 - p01 * h1) / det;
  const double want_b2 = (-p01 * h0 + p00 * h1) / det;

  RngState rng(61);
  std::vector<double> d1, d2;
  for (int k = 0; k < 100000; ++k) {
    GibbsState s = state_for(dm, beta0, tau1, sigma);
    s.tau2_sq = tau2;
    cond_draw_b(s, dm, priors, rng);
    d1.push_back(s.b1[0]);
    d2.push_back(s.b2[0]);
  }
  CHECK(mean(d1) == doctest::Approx(want_b1).epsilon(0.02));
  CHECK(mean(d2) == doctest::Approx(want_b2).epsilon(0.02));
  CHECK(variance(d1) == doctest::Approx(p11 / det).epsilon(0.03));
  CHECK(variance(d2) == doctest::Approx(p00 / det).epsilon(0.03));
}

TEST_CASE("slope-variant chain keeps all variances positive and tracks tau2") {
  const SimulatedCohort sim = simulate_cohort(default_truth(), {.n_subjects = 24}, 15);
  ModelSpec spec = ModelSpec::base_model();
  spec.random_terms = {RandomTerm::Intercept, RandomTerm::GASlope};
  const DesignMatrices dm = build_design(sim.cohort, spec);
  const GibbsChain chain = run_gibbs(dm, {}, 400, 0.2, 21);
  REQUIRE(chain.has_slope);
  REQUIRE(chain.tau2_sq.size() == chain.n_retained());
  for (double v : chain.tau2_sq) CHECK(v > 0.0);
}
