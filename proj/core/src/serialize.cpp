#include "longmix/serialize.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "longmix/data/cohort_io.hpp"

namespace longmix {

namespace {

using json = nlohmann::ordered_json;

json vc_to_json(const VarianceComponents& vc) {
  json out;
  out["tau1_sq"] = vc.tau1_sq;
  out["tau2_sq"] = vc.tau2_sq ? json(*vc.tau2_sq) : json(nullptr);
  out["tau12"] = vc.tau12 ? json(*vc.tau12) : json(nullptr);
  out["sigma_eps_sq"] = vc.sigma_eps_sq;
  return out;
}

}  // namespace

std::string fit_to_json(const LmmFit& fit, const std::vector<SatterthwaiteResult>& tests) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["model"] = fit.spec.to_string();
  out["criterion"] = fit.criterion == FitCriterion::REML ? "reml" : "ml";
  out["n_obs"] = fit.n_obs;
  out["n_subjects"] = fit.n_subjects;
  out["converged"] = fit.converged;
  out["iterations"] = fit.iterations;

  json coefs = json::array();
  for (std::size_t j = 0; j < fit.beta.size(); ++j) {
    json c;
    c["term"] = fit.labels[j];
    c["estimate"] = fit.beta[j];
    c["se"] = std::sqrt(fit.cov_beta(j, j));
    if (j < tests.size()) {
      const SatterthwaiteResult& t = tests[j];
      c["df"] = std::isfinite(t.df) ? json(t.df) : json(nullptr);
      c["t"] = t.t;
      c["p"] = t.p_value;
      c["df_method"] = t.normal_approx ? "normal" : "satterthwaite";
    }
    coefs.push_back(std::move(c));
  }
  out["coefficients"] = std::move(coefs);
  out["variance_components"] = vc_to_json(fit.vc);
  out["loglik"] = {{"ml", fit.loglik_ml}, {"reml", fit.loglik_reml}};
  return out.dump(2) + "\n";
}

std::string chain_summary_to_json(const GibbsChain& chain, std::optional<double> p_b) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["n_iter"] = chain.n_iter;
  out["burn_fraction"] = chain.burn_fraction;
  out["n_retained"] = chain.n_retained();
  out["seed"] = chain.seed;

  json coefs = json::array();
  json vcs = json::array();
  for (const ParamSummary& s : chain.summaries) {
    json row;
    row["term"] = s.name;
    row["mean"] = s.mean;
    row["sd"] = s.sd;
    row["ci_lower"] = s.q025;
    row["ci_upper"] = s.q975;
    row["ess"] = s.ess;
    const bool is_vc =
        s.name == "tau1_sq" || s.name == "tau2_sq" || s.name == "sigma_eps_sq";
    (is_vc ? vcs : coefs).push_back(std::move(row));
  }
  out["coefficients"] = std::move(coefs);
  out["variance_components"] = std::move(vcs);
  out["ppc"] = p_b ? json{{"p_b", *p_b}} : json(nullptr);
  return out.dump(2) + "\n";
}

std::string chain_to_csv(const GibbsChain& chain) {
  std::ostringstream out;
  out << "iteration";
  for (const auto& label : chain.beta_labels) out << ',' << label;
  out << ",tau1_sq";
  if (chain.has_slope) out << ",tau2_sq";
  out << ",sigma_eps_sq\n";
  for (std::size_t s = 0; s < chain.n_retained(); ++s) {
    out << s;
    for (std::size_t j = 0; j < chain.beta.cols(); ++j)
      out << ',' << format_double(chain.beta(s, j));
    out << ',' << format_double(chain.tau1_sq[s]);
    if (chain.has_slope) out << ',' << format_double(chain.tau2_sq[s]);
    out << ',' << format_double(chain.sigma_eps_sq[s]) << '\n';
  }
  return out.str();
}

std::string chain_b_to_csv(const GibbsChain& chain,
                           const std::vector<std::string>& subject_ids) {
  std::ostringstream out;
  out << "iteration,subject_id,b1";
  if (chain.has_slope) out << ",b2";
  out << '\n';
  for (std::size_t s = 0; s < chain.n_retained(); ++s)
    for (std::size_t i = 0; i < chain.b1.cols(); ++i) {
      out << s << ',' << subject_ids[i] << ',' << format_double(chain.b1(s, i));
      if (chain.has_slope) out << ',' << format_double(chain.b2(s, i));
      out << '\n';
    }
  return out.str();
}

std::string diagnostics_acf_to_csv(const std::vector<ParamDiagnostics>& diags) {
  std::ostringstream out;
  out << "lag";
  for (const auto& d : diags) out << ',' << d.name;
  out << '\n';
  if (diags.empty()) return out.str();
  for (std::size_t lag = 0; lag < diags.front().acf.size(); ++lag) {
    out << lag;
    for (const auto& d : diags) out << ',' << format_double(d.acf[lag]);
    out << '\n';
  }
  return out.str();
}

std::string residuals_to_csv(const std::vector<double>& fitted, const Series& pearson) {
  std::ostringstream out;
  out << "row,fitted,pearson_residual\n";
  for (std::size_t r = 0; r < pearson.size(); ++r)
    out << r << ',' << format_double(fitted[r]) << ',' << format_double(pearson[r]) << '\n';
  return out.str();
}

std::string qq_to_csv(const std::vector<std::pair<double, double>>& points) {
  std::ostringstream out;
  out << "theoretical,empirical\n";
  for (const auto& [t, e] : points)
    out << format_double(t) << ',' << format_double(e) << '\n';
  return out.str();
}

std::string ppc_to_csv(const PpcResult& ppc) {
  std::ostringstream out;
  out << "draw,observed,replicated\n";
  for (std::size_t s = 0; s < ppc.observed.size(); ++s)
    out << s << ',' << format_double(ppc.observed[s]) << ','
        << format_double(ppc.replicated[s]) << '\n';
  return out.str();
}

std::string describe_to_json(const DescriptiveSummary& s) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["n_subjects"] = s.n_subjects;
  out["n_obs"] = s.n_obs;

  auto categorical = [](const auto& counts, const auto& pct) {
    json rows = json::array();
    for (std::size_t i = 0; i < counts.size(); ++i)
      rows.push_back({{"level", i}, {"count", counts[i]}, {"percent", pct[i]}});
    return rows;
  };
  out["ct_sum"] = categorical(s.ct_sum_counts, s.ct_sum_pct);
  out["ob_risk"] = categorical(s.ob_risk_counts, s.ob_risk_pct);
  out["parity"] = categorical(s.parity_counts, s.parity_pct);

  auto quantitative = [](const QuantitativeSummary& q) {
    json row;
    row["mean"] = q.mean;
    row["range"] = q.range;
    row["skewness"] = q.skewness ? json(*q.skewness) : json(nullptr);
    return row;
  };
  out["dces"] = quantitative(s.dces);
  out["bmi"] = quantitative(s.bmi);
  out["cses"] = quantitative(s.cses);
  out["ga_weeks"] = quantitative(s.ga);
  out["pcrh"] = quantitative(s.pcrh);
  return out.dump(2) + "\n";
}

std::string truth_to_json(const SimulationTruth& truth, std::size_t n_subjects) {
  static const char* kBetaNames[] = {"Intercept", "GA",   "CT-Sum", "CT-Sum:GA", "BMI",
                                     "CSES",      "DCES", "OB-risk", "Parity"};
  json out;
  out["schema_version"] = kSchemaVersion;
  out["n_subjects"] = n_subjects;
  json beta;
  for (std::size_t j = 0; j < truth.beta.size(); ++j) beta[kBetaNames[j]] = truth.beta[j];
  out["beta"] = std::move(beta);
  out["hinge_beta"] = truth.hinge_beta ? json(*truth.hinge_beta) : json(nullptr);
  out["knot"] = truth.knot;
  out["tau1_sq"] = truth.tau1_sq;
  out["sigma_eps_sq"] = truth.sigma_eps_sq;
  out["seed"] = truth.seed;
  out["b1"] = truth.b1;
  return out.dump(2) + "\n";
}

std::string effects_to_csv(const std::vector<EffectReport>& points,
                           const std::vector<SlopeReport>& slopes) {
  std::ostringstream out;
  out << "kind,ga,ct_delta,ct,segment,log_effect,percent\n";
  for (const EffectReport& e : points)
    out << "point," << format_double(e.ga) << ',' << format_double(e.ct_delta) << ",,,"
        << format_double(e.log_effect) << ',' << format_double(e.percent_change) << '\n';
  for (const SlopeReport& s : slopes)
    out << "weekly_slope,,," << format_double(s.ct) << ','
        << (s.segment == GaSegment::Before ? "before" : "after") << ','
        << format_double(s.log_slope) << ',' << format_double(s.percent_per_week) << '\n';
  return out.str();
}

}  // namespace longmix
