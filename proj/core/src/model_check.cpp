#include "longmix/bayes/model_check.hpp"

#include <cmath>

#include "longmix/errors.hpp"
#include "longmix/numerics/series.hpp"

namespace longmix {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

std::vector<double> row_of(const Matrix& m, std::size_t row) {
  std::vector<double> out(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) out[j] = m(row, j);
  return out;
}

}  // namespace

double conditional_deviance(const std::vector<double>& beta, const std::vector<double>& b1,
                            const std::vector<double>& b2, double sigma_eps_sq,
                            const DesignMatrices& dm) {
  if (!(sigma_eps_sq > 0.0)) throw DomainError("conditional_deviance: sigma_eps_sq <= 0");
  double dev = 0.0;
  for (std::size_t r = 0; r < dm.n_obs(); ++r) {
    double mu = 0.0;
    for (std::size_t j = 0; j < dm.n_fixed(); ++j) mu += dm.x(r, j) * beta[j];
    const std::size_t si = dm.subject_of_row[r];
    mu += b1[si];
    if (!b2.empty()) mu += b2[si] * dm.ga[r];
    const double resid = dm.y[r] - mu;
    dev += kLog2Pi + std::log(sigma_eps_sq) + resid * resid / sigma_eps_sq;
  }
  return dev;
}

DicResult dic(const GibbsChain& chain, const DesignMatrices& dm) {
  const std::size_t s_count = chain.n_retained();
  if (s_count == 0) throw DomainError("dic: empty chain");

  const std::size_t p = chain.beta.cols();
  const std::size_t m = chain.b1.cols();
  std::vector<double> beta_bar(p, 0.0);
  std::vector<double> b1_bar(m, 0.0);
  std::vector<double> b2_bar(chain.has_slope ? m : 0, 0.0);
  double sigma_bar = 0.0;
  double mean_dev = 0.0;

  for (std::size_t s = 0; s < s_count; ++s) {
    const std::vector<double> beta = row_of(chain.beta, s);
    const std::vector<double> b1 = row_of(chain.b1, s);
    const std::vector<double> b2 =
        chain.has_slope ? row_of(chain.b2, s) : std::vector<double>{};
    mean_dev += conditional_deviance(beta, b1, b2, chain.sigma_eps_sq[s], dm);
    for (std::size_t j = 0; j < p; ++j) beta_bar[j] += beta[j];
    for (std::size_t i = 0; i < m; ++i) b1_bar[i] += b1[i];
    if (chain.has_slope)
      for (std::size_t i = 0; i < m; ++i) b2_bar[i] += b2[i];
    sigma_bar += chain.sigma_eps_sq[s];
  }
  const double n = static_cast<double>(s_count);
  mean_dev /= n;
  for (auto& v : beta_bar) v /= n;
  for (auto& v : b1_bar) v /= n;
  for (auto& v : b2_bar) v /= n;
  sigma_bar /= n;

  const double dev_at_mean = conditional_deviance(beta_bar, b1_bar, b2_bar, sigma_bar, dm);
  DicResult r;
  r.mean_deviance = mean_dev;
  r.p_d = mean_dev - dev_at_mean;
  r.dic = mean_dev + r.p_d;
  return r;
}

PpcResult posterior_predictive_pvalue(const GibbsChain& chain, const DesignMatrices& dm,
                                      RngState& rng) {
  const std::size_t s_count = chain.n_retained();
  if (s_count < 100) throw DomainError("posterior_predictive_pvalue: need >= 100 draws");

  PpcResult result;
  result.observed.reserve(s_count);
  result.replicated.reserve(s_count);

  DesignMatrices rep = dm;  // same design, replicated responses
  std::size_t exceed = 0;
  for (std::size_t s = 0; s < s_count; ++s) {
    const std::vector<double> beta = row_of(chain.beta, s);
    const std::vector<double> b1 = row_of(chain.b1, s);
    const std::vector<double> b2 =
        chain.has_slope ? row_of(chain.b2, s) : std::vector<double>{};
    const double sigma_sq = chain.sigma_eps_sq[s];
    const double sigma = std::sqrt(sigma_sq);

    const double t_obs = conditional_deviance(beta, b1, b2, sigma_sq, dm);

    for (std::size_t r = 0; r < dm.n_obs(); ++r) {
      double mu = 0.0;
      for (std::size_t j = 0; j < dm.n_fixed(); ++j) mu += dm.x(r, j) * beta[j];
      const std::size_t si = dm.subject_of_row[r];
      mu += b1[si];
      if (!b2.empty()) mu += b2[si] * dm.ga[r];
      rep.y[r] = draw_normal(rng, mu, sigma);
    }
    const double t_rep = conditional_deviance(beta, b1, b2, sigma_sq, rep);

    result.observed.push_back(t_obs);
    result.replicated.push_back(t_rep);
    if (t_rep > t_obs) ++exceed;
  }
  result.p_b = static_cast<double>(exceed) / static_cast<double>(s_count);
  return result;
}

std::vector<ParamDiagnostics> chain_diagnostics(const GibbsChain& chain) {
  const std::size_t s_count = chain.n_retained();
  if (s_count <= 50) throw DomainError("chain_diagnostics: chain length must exceed 50");

  std::vector<ParamDiagnostics> out;
  auto add = [&](const std::string& name, std::vector<double> trace) {
    ParamDiagnostics d;
    d.name = name;
    d.acf = acf(trace, 50);
    d.ess = effective_sample_size(trace);
    d.trace = std::move(trace);
    out.push_back(std::move(d));
  };

  std::vector<double> column(s_count);
  for (std::size_t j = 0; j < chain.beta.cols(); ++j) {
    for (std::size_t s = 0; s < s_count; ++s) column[s] = chain.beta(s, j);
    add(chain.beta_labels[j], column);
  }
  add("tau1_sq", chain.tau1_sq);
  if (chain.has_slope) add("tau2_sq", chain.tau2_sq);
  add("sigma_eps_sq", chain.sigma_eps_sq);
  return out;
}

}  // namespace longmix
