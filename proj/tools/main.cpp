// longmix: longitudinal mixed-model pipeline for log-scale hormone outcomes.
// Subcommands: simulate, describe, fit, compare, effects.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "longmix/bayes/model_check.hpp"
#include "longmix/data/cohort_io.hpp"
#include "longmix/data/describe.hpp"
#include "longmix/data/simulate.hpp"
#include "longmix/design/design.hpp"
#include "longmix/errors.hpp"
#include "longmix/lmm/diagnostics.hpp"
#include "longmix/lmm/effects.hpp"
#include "longmix/lmm/inference.hpp"
#include "longmix/numerics/special.hpp"
#include "longmix/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace longmix;

namespace {

// Exit codes: 0 success, 2 usage error, 3 data validation error,
// 4 convergence failure, 1 anything else.
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitConvergence = 4;

struct RunConfig {
  std::string input;
  std::string out_dir = ".";
  std::string model = "fixed=1+GA+CT+CT:GA+BMI+CSES+DCES+OB+PAR random=1";
  std::uint64_t seed = 0;
  std::size_t iters = 10000;
  double burn = 0.2;
  std::string prior;
  std::string method = "reml";
  std::size_t max_iter = 500;
  bool bayes = false;
  bool export_b = false;

  // simulate
  std::size_t subjects = 88;
  std::size_t visits_min = 3;
  std::size_t visits_max = 5;
  std::size_t visits_fixed = 0;  // 0 = use the range
  double tau1 = 0.40;
  double sigma_eps = 0.25;
  double knot = 20.0;
  double hinge_beta = std::numeric_limits<double>::quiet_NaN();

  // compare
  std::string null_model;
  std::string alt_model;
  std::string compare_method = "auto";
  std::string lrt_method = "auto";

  // effects
  double beta_ct = 0.0;
  double beta_ctga = 0.0;
  double beta_ga = 0.0;
  double beta_hinge = 0.0;
  bool piecewise = false;
  std::vector<double> ga_list;
  std::vector<double> ct_delta_list;
  std::vector<double> ct_list;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
}

PriorHyperparams parse_priors(const std::string& text) {
  PriorHyperparams priors;
  if (text.empty()) return priors;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    const auto eq = token.find('=');
    if (eq == std::string::npos)
      throw DomainError("prior spec: expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    double value = 0.0;
    try {
      value = std::stod(token.substr(eq + 1));
    } catch (const std::exception&) {
      throw DomainError("prior spec: bad number in '" + token + "'");
    }
    if (key == "a")
      priors.a = value;
    else if (key == "b")
      priors.b = value;
    else if (key == "c")
      priors.c = value;
    else if (key == "d")
      priors.d = value;
    else if (key == "slsq")
      priors.sigma_l_sq = {value};
    else
      throw DomainError("prior spec: unknown key '" + key + "'");
  }
  priors.validate();
  return priors;
}

FitCriterion parse_criterion(const std::string& method) {
  if (method == "reml") return FitCriterion::REML;
  if (method == "ml") return FitCriterion::ML;
  throw DomainError("--method must be reml or ml");
}

int cmd_simulate(const RunConfig& cfg) {
  SimulationTruth truth = default_truth();
  truth.tau1_sq = cfg.tau1 * cfg.tau1;
  truth.sigma_eps_sq = cfg.sigma_eps * cfg.sigma_eps;
  truth.knot = cfg.knot;
  if (!std::isnan(cfg.hinge_beta)) truth.hinge_beta = cfg.hinge_beta;

  SimulationParams params;
  params.n_subjects = cfg.subjects;
  params.visits_min = cfg.visits_fixed > 0 ? cfg.visits_fixed : cfg.visits_min;
  params.visits_max = cfg.visits_fixed > 0 ? cfg.visits_fixed : cfg.visits_max;

  const SimulatedCohort sim = simulate_cohort(truth, params, cfg.seed);
  fs::create_directories(cfg.out_dir);
  write_csv_file(sim.cohort, (fs::path(cfg.out_dir) / "cohort.csv").string());
  write_file(fs::path(cfg.out_dir) / "truth.json", truth_to_json(sim.truth, cfg.subjects));
  std::cout << "wrote " << (fs::path(cfg.out_dir) / "cohort.csv").string() << " ("
            << sim.cohort.subjects.size() << " subjects, " << sim.cohort.n_obs()
            << " observations)\n";
  return 0;
}

int cmd_describe(const RunConfig& cfg) {
  const Cohort cohort = load_csv_file(cfg.input);
  const DescriptiveSummary summary = describe(cohort);
  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "describe.json", describe_to_json(summary));
  std::cout << describe_text(summary);
  return 0;
}

int fit_frequentist(const RunConfig& cfg, const DesignMatrices& dm) {
  const FitCriterion criterion = parse_criterion(cfg.method);
  const LmmFit fit = fit_lmm(dm, criterion, cfg.max_iter);

  std::vector<SatterthwaiteResult> tests;
  for (std::size_t j = 0; j < fit.beta.size(); ++j) {
    if (criterion == FitCriterion::REML && fit.converged) {
      tests.push_back(satterthwaite_test(fit, dm, j));
    } else {
      SatterthwaiteResult r;
      r.t = fit.beta[j] / std::sqrt(fit.cov_beta(j, j));
      r.df = std::numeric_limits<double>::infinity();
      r.p_value = 2.0 * (1.0 - normal_cdf(std::fabs(r.t)));
      r.normal_approx = true;
      tests.push_back(r);
    }
  }

  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "fit.json", fit_to_json(fit, tests));
  const Series residuals = pearson_residuals(fit, dm);
  write_file(fs::path(cfg.out_dir) / "residuals.csv",
             residuals_to_csv(fitted_values(fit, dm), residuals));
  write_file(fs::path(cfg.out_dir) / "qq.csv", qq_to_csv(qq_points(residuals)));

  std::printf("%-12s %10s %10s %8s %8s %9s\n", "term", "estimate", "se", "df", "t", "p");
  for (std::size_t j = 0; j < fit.beta.size(); ++j)
    std::printf("%-12s %10.4f %10.4f %8.1f %8.3f %9.4g\n", fit.labels[j].c_str(),
                fit.beta[j], std::sqrt(fit.cov_beta(j, j)), tests[j].df, tests[j].t,
                tests[j].p_value);
  std::printf("tau1_sq=%.5f sigma_eps_sq=%.5f loglik_%s=%.4f converged=%s\n",
              fit.vc.tau1_sq, fit.vc.sigma_eps_sq,
              criterion == FitCriterion::REML ? "reml" : "ml",
              criterion == FitCriterion::REML ? fit.loglik_reml : fit.loglik_ml,
              fit.converged ? "yes" : "no");
  if (!fit.converged)
    throw ConvergenceFailure("fit did not converge", fit.iterations, 0.0);
  return 0;
}

int fit_bayes(const RunConfig& cfg, const DesignMatrices& dm) {
  const PriorHyperparams priors = parse_priors(cfg.prior);
  const GibbsChain chain = run_gibbs(dm, priors, cfg.iters, cfg.burn, cfg.seed);

  RngState ppc_rng(cfg.seed + 1);
  const PpcResult ppc = posterior_predictive_pvalue(chain, dm, ppc_rng);
  const auto diags = chain_diagnostics(chain);

  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "bayes_summary.json",
             chain_summary_to_json(chain, ppc.p_b));
  write_file(fs::path(cfg.out_dir) / "chain.csv", chain_to_csv(chain));
  write_file(fs::path(cfg.out_dir) / "acf.csv", diagnostics_acf_to_csv(diags));
  write_file(fs::path(cfg.out_dir) / "ppc.csv", ppc_to_csv(ppc));
  if (cfg.export_b)
    write_file(fs::path(cfg.out_dir) / "chain_subjects.csv",
               chain_b_to_csv(chain, dm.subject_ids));

  std::printf("%-12s %10s %10s %10s %10s %8s\n", "term", "mean", "sd", "2.5%", "97.5%",
              "ess");
  for (const ParamSummary& s : chain.summaries)
    std::printf("%-12s %10.4f %10.4f %10.4f %10.4f %8.0f\n", s.name.c_str(), s.mean, s.sd,
                s.q025, s.q975, s.ess);
  std::printf("p_b=%.3f retained=%zu\n", ppc.p_b, chain.n_retained());
  return 0;
}

int cmd_fit(const RunConfig& cfg) {
  const Cohort cohort = load_csv_file(cfg.input);
  const DesignMatrices dm = build_design(cohort, ModelSpec::parse(cfg.model));
  return cfg.bayes ? fit_bayes(cfg, dm) : fit_frequentist(cfg, dm);
}

int cmd_compare(const RunConfig& cfg) {
  const Cohort cohort = load_csv_file(cfg.input);
  const ModelSpec null_spec = ModelSpec::parse(cfg.null_model);
  const ModelSpec alt_spec = ModelSpec::parse(cfg.alt_model);
  const DesignMatrices null_dm = build_design(cohort, null_spec);
  const DesignMatrices alt_dm = build_design(cohort, alt_spec);

  const bool fixed_differ = null_spec.fixed_terms.size() != alt_spec.fixed_terms.size();
  const bool random_differ = null_spec.has_random_slope() != alt_spec.has_random_slope();

  FitCriterion criterion;
  if (cfg.compare_method == "auto")
    criterion = fixed_differ ? FitCriterion::ML : FitCriterion::REML;
  else
    criterion = parse_criterion(cfg.compare_method);

  LrtMethod method;
  if (cfg.lrt_method == "auto")
    method = random_differ && !fixed_differ ? LrtMethod::BoundaryMixture : LrtMethod::Standard;
  else if (cfg.lrt_method == "standard")
    method = LrtMethod::Standard;
  else if (cfg.lrt_method == "boundary")
    method = LrtMethod::BoundaryMixture;
  else
    throw DomainError("--lrt must be auto, standard, or boundary");

  const LmmFit null_fit = fit_lmm(null_dm, criterion);
  const LmmFit alt_fit = fit_lmm(alt_dm, criterion);
  const LrtResult lr = lrt(null_fit, alt_fit, method);

  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["criterion"] = criterion == FitCriterion::REML ? "reml" : "ml";
  doc["null_model"] = null_spec.to_string();
  doc["alt_model"] = alt_spec.to_string();
  doc["lrt"] = {
      {"statistic", lr.statistic},
      {"method", lr.method == LrtMethod::BoundaryMixture ? "boundary_mixture" : "standard"},
      {"df", lr.method == LrtMethod::BoundaryMixture ? ordered_json(nullptr)
                                                     : ordered_json(lr.df)},
      {"p_value", lr.p_value}};
  doc["loglik"] = {{"null", {{"ml", null_fit.loglik_ml}, {"reml", null_fit.loglik_reml}}},
                   {"alt", {{"ml", alt_fit.loglik_ml}, {"reml", alt_fit.loglik_reml}}}};

  if (cfg.bayes) {
    const PriorHyperparams priors = parse_priors(cfg.prior);
    const GibbsChain null_chain = run_gibbs(null_dm, priors, cfg.iters, cfg.burn, cfg.seed);
    const GibbsChain alt_chain = run_gibbs(alt_dm, priors, cfg.iters, cfg.burn, cfg.seed + 1);
    const DicResult null_dic = dic(null_chain, null_dm);
    const DicResult alt_dic = dic(alt_chain, alt_dm);
    doc["dic"] = {{"null",
                   {{"dic", null_dic.dic},
                    {"p_d", null_dic.p_d},
                    {"mean_deviance", null_dic.mean_deviance}}},
                  {"alt",
                   {{"dic", alt_dic.dic},
                    {"p_d", alt_dic.p_d},
                    {"mean_deviance", alt_dic.mean_deviance}}},
                  {"preferred", null_dic.dic <= alt_dic.dic ? "null" : "alt"}};
  } else {
    doc["dic"] = nullptr;
  }

  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "compare.json", doc.dump(2) + "\n");
  std::printf("lrt statistic=%.4f p=%.4f (%s)\n", lr.statistic, lr.p_value,
              lr.method == LrtMethod::BoundaryMixture ? "boundary mixture" : "standard");
  if (cfg.bayes)
    std::printf("dic null=%.2f alt=%.2f preferred=%s\n",
                doc["dic"]["null"]["dic"].get<double>(),
                doc["dic"]["alt"]["dic"].get<double>(),
                doc["dic"]["preferred"].get<std::string>().c_str());
  return 0;
}

int cmd_effects(const RunConfig& cfg) {
  std::vector<EffectReport> points;
  std::vector<SlopeReport> slopes;
  if (cfg.piecewise) {
    if (cfg.ct_list.empty()) throw DomainError("effects --piecewise requires --ct");
    for (double ct : cfg.ct_list) {
      slopes.push_back(piecewise_slope_percent(cfg.beta_ga, cfg.beta_hinge, cfg.beta_ctga,
                                               ct, GaSegment::Before));
      slopes.push_back(piecewise_slope_percent(cfg.beta_ga, cfg.beta_hinge, cfg.beta_ctga,
                                               ct, GaSegment::After));
    }
  } else {
    if (cfg.ga_list.empty() || cfg.ct_delta_list.empty())
      throw DomainError("effects requires --ga and --ct-delta");
    for (double delta : cfg.ct_delta_list)
      for (double ga : cfg.ga_list)
        points.push_back(effect_percent(cfg.beta_ct, cfg.beta_ctga, ga, delta));
  }

  const std::string csv = effects_to_csv(points, slopes);
  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "effects.csv", csv);
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"longitudinal mixed-effects pipeline (frequentist and Bayesian)"};
  app.require_subcommand(1);

  app.add_option("--seed", cfg.seed, "RNG seed (every run is reproducible)");
  app.add_option("--out-dir", cfg.out_dir, "output directory");
  app.fallthrough();  // global flags may follow the subcommand name

  auto* sim = app.add_subcommand("simulate", "write a synthetic cohort CSV + truth JSON");
  sim->add_option("--subjects", cfg.subjects, "number of subjects");
  sim->add_option("--visits", cfg.visits_fixed, "fixed visits per subject");
  sim->add_option("--visits-min", cfg.visits_min, "minimum visits per subject");
  sim->add_option("--visits-max", cfg.visits_max, "maximum visits per subject");
  sim->add_option("--tau1", cfg.tau1, "random-intercept sd");
  sim->add_option("--sigma-eps", cfg.sigma_eps, "residual sd");
  sim->add_option("--hinge-beta", cfg.hinge_beta,
                  "post-knot slope increment (enables the piecewise mean)");
  sim->add_option("--knot", cfg.knot, "knot in GA weeks");

  auto* desc = app.add_subcommand("describe", "descriptive statistics of a cohort CSV");
  desc->add_option("--input", cfg.input, "cohort CSV")->required();

  auto* fit = app.add_subcommand("fit", "fit a mixed model (REML/ML or Gibbs)");
  fit->add_option("--input", cfg.input, "cohort CSV")->required();
  fit->add_option("--model", cfg.model, "model spec string");
  fit->add_option("--method", cfg.method, "reml or ml");
  fit->add_flag("--bayes", cfg.bayes, "Gibbs sampler instead of REML/ML");
  fit->add_option("--iters", cfg.iters, "MCMC iterations");
  fit->add_option("--burn", cfg.burn, "burn-in fraction");
  fit->add_option("--prior", cfg.prior, "a=..,b=..,c=..,d=..,slsq=..");
  fit->add_option("--max-iter", cfg.max_iter, "optimizer iteration budget per restart");
  fit->add_flag("--export-b", cfg.export_b, "also write per-subject effect draws");

  auto* cmp = app.add_subcommand("compare", "likelihood-ratio test and optional DIC");
  cmp->add_option("--input", cfg.input, "cohort CSV")->required();
  cmp->add_option("--null", cfg.null_model, "null model spec")->required();
  cmp->add_option("--alt", cfg.alt_model, "alternative model spec")->required();
  cmp->add_option("--method", cfg.compare_method, "reml, ml, or auto");
  cmp->add_option("--lrt", cfg.lrt_method, "auto, standard, or boundary");
  cmp->add_flag("--bayes", cfg.bayes, "also compare DIC from Gibbs chains");
  cmp->add_option("--iters", cfg.iters, "MCMC iterations for --bayes");
  cmp->add_option("--burn", cfg.burn, "burn-in fraction for --bayes");
  cmp->add_option("--prior", cfg.prior, "prior overrides for --bayes");

  auto* eff = app.add_subcommand("effects", "exponentiated-coefficient percent effects");
  eff->add_option("--beta-ct", cfg.beta_ct, "trauma-count coefficient");
  eff->add_option("--beta-ctga", cfg.beta_ctga, "trauma x GA interaction coefficient");
  eff->add_option("--ga", cfg.ga_list, "gestational ages")->delimiter(',');
  eff->add_option("--ct-delta", cfg.ct_delta_list, "trauma-count differences")
      ->delimiter(',');
  eff->add_flag("--piecewise", cfg.piecewise, "weekly slopes before/after the knot");
  eff->add_option("--beta-ga", cfg.beta_ga, "GA slope coefficient");
  eff->add_option("--beta-hinge", cfg.beta_hinge, "post-knot slope increment");
  eff->add_option("--ct", cfg.ct_list, "trauma counts for --piecewise")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(cfg);
    if (desc->parsed()) return cmd_describe(cfg);
    if (fit->parsed()) return cmd_fit(cfg);
    if (cmp->parsed()) return cmd_compare(cfg);
    if (eff->parsed()) return cmd_effects(cfg);
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const EmptyCohort& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const RankDeficient& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DegenerateInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ConvergenceFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const NotPositiveDefinite& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const NotNested& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
