#include "longmix/bayes/gibbs.hpp"

#include <cmath>

#include "longmix/errors.hpp"
#include "longmix/numerics/series.hpp"

namespace longmix {

namespace {

// Row means given the current random effects: y - b Z, per observation.
double random_part(const GibbsState& state, const DesignMatrices& dm, std::size_t row) {
  const std::size_t si = dm.subject_of_row[row];
  double part = state.b1[si];
  if (!state.b2.empty()) part += state.b2[si] * dm.ga[row];
  return part;
}

double fixed_part(const GibbsState& state, const DesignMatrices& dm, std::size_t row) {
  double mu = 0.0;
  for (std::size_t j = 0; j < dm.n_fixed(); ++j) mu += dm.x(row, j) * state.beta[j];
  return mu;
}

void check_state(const GibbsState& state, const DesignMatrices& dm) {
  if (state.beta.size() != dm.n_fixed() || state.b1.size() != dm.n_subjects())
    throw DomainError("gibbs: state dimensions do not match the design");
  if (dm.random_slope() != !state.b2.empty())
    throw DomainError("gibbs: state slope block does not match the design");
  if (!(state.tau1_sq > 0.0) || !(state.sigma_eps_sq > 0.0))
    throw DomainError("gibbs: variances must be strictly positive");
}

}  // namespace

void PriorHyperparams::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0) || !(d > 0.0))
    throw DomainError("priors: a, b, c, d must be positive");
  if (c2 && !(*c2 > 0.0)) throw DomainError("priors: c2 must be positive");
  if (d2 && !(*d2 > 0.0)) throw DomainError("priors: d2 must be positive");
  for (double v : sigma_l_sq)
    if (!(v > 0.0)) throw DomainError("priors: sigma_l_sq must be positive");
}

std::vector<double> PriorHyperparams::coefficient_prior_variances(std::size_t p) const {
  if (sigma_l_sq.empty()) return std::vector<double>(p, 1e6);
  if (sigma_l_sq.size() == 1) return std::vector<double>(p, sigma_l_sq[0]);
  if (sigma_l_sq.size() != p)
    throw DomainError("priors: sigma_l_sq has " + std::to_string(sigma_l_sq.size()) +
                      " entries for " + std::to_string(p) + " coefficients");
  return sigma_l_sq;
}

void cond_draw_b(GibbsState& state, const DesignMatrices& dm, const PriorHyperparams& priors,
                 RngState& rng) {
  priors.validate();
  check_state(state, dm);
  const double inv_sigma = 1.0 / state.sigma_eps_sq;

  if (!dm.random_slope()) {
    for (std::size_t si = 0; si < dm.n_subjects(); ++si) {
      const auto [begin, end] = dm.subject_rows[si];
      double resid_sum = 0.0;
      for (std::size_t r = begin; r < end; ++r)
        resid_sum += dm.y[r] - fixed_part(state, dm, r);
      const double prec = static_cast<double>(end - begin) * inv_sigma + 1.0 / state.tau1_sq;
      const double mean = resid_sum * inv_sigma / prec;
      state.b1[si] = draw_normal(rng, mean, std::sqrt(1.0 / prec));
    }
    return;
  }

  // Bivariate conditional with independent intercept/slope priors.
  for (std::size_t si = 0; si < dm.n_subjects(); ++si) {
    const auto [begin, end] = dm.subject_rows[si];
    double p00 = 1.0 / state.tau1_sq, p01 = 0.0, p11 = 1.0 / state.tau2_sq;
    double h0 = 0.0, h1 = 0.0;
    for (std::size_t r = begin; r < end; ++r) {
      const double g = dm.ga[r];
      const double resid = dm.y[r] - fixed_part(state, dm, r);
      p00 += inv_sigma;
      p01 += g * inv_sigma;
      p11 += g * g * inv_sigma;
      h0 += resid * inv_sigma;
      h1 += g * resid * inv_sigma;
    }
    // 2x2 Cholesky of the precision, mean solve, and N(mean, P^-1) draw.
    const double l00 = std::sqrt(p00);
    const double l10 = p01 / l00;
    const double l11 = std::sqrt(p11 - l10 * l10);
    const double w0 = h0 / l00;
    const double w1 = (h1 - l10 * w0) / l11;
    const double mean1 = w1 / l11;
    const double mean0 = (w0 - l10 * mean1) / l00;
    const double z0 = draw_normal(rng, 0.0, 1.0);
    const double z1 = draw_normal(rng, 0.0, 1.0);
    const double u1 = z1 / l11;
    const double u0 = (z0 - l10 * u1) / l00;
    state.b1[si] = mean0 + u0;
    state.b2[si] = mean1 + u1;
  }
}

void cond_draw_beta(GibbsState& state, const DesignMatrices& dm,
                    const PriorHyperparams& priors, RngState& rng) {
  priors.validate();
  check_state(state, dm);
  const std::size_t p = dm.n_fixed();
  const double inv_sigma = 1.0 / state.sigma_eps_sq;
  const std::vector<double> prior_var = priors.coefficient_prior_variances(p);

  Matrix prec(p, p, 0.0);
  std::vector<double> xt_y_adj(p, 0.0);
  for (std::size_t r = 0; r < dm.n_obs(); ++r) {
    const double y_adj = dm.y[r] - random_part(state, dm, r);
    for (std::size_t jj = 0; jj < p; ++jj) {
      const double xr = dm.x(r, jj);
      xt_y_adj[jj] += xr * y_adj;
      for (std::size_t kk = jj; kk < p; ++kk) prec(jj, kk) += xr * dm.x(r, kk);
    }
  }
  for (std::size_t jj = 0; jj < p; ++jj) {
    for (std::size_t kk = jj; kk < p; ++kk) {
      prec(jj, kk) *= inv_sigma;
      prec(kk, jj) = prec(jj, kk);
    }
    prec(jj, jj) += 1.0 / prior_var[jj];
    xt_y_adj[jj] *= inv_sigma;
  }

  const Matrix l = cholesky(prec);
  const std::vector<double> mean = solve_lower_transpose(l, solve_lower(l, xt_y_adj));
  std::vector<double> z(p);
  for (auto& v : z) v = draw_normal(rng, 0.0, 1.0);
  const std::vector<double> shift = solve_lower_transpose(l, z);
  for (std::size_t jj = 0; jj < p; ++jj) state.beta[jj] = mean[jj] + shift[jj];
}

void cond_draw_tau1_sq(GibbsState& state, const PriorHyperparams& priors, RngState& rng) {
  priors.validate();
  const double m = static_cast<double>(state.b1.size());
  double ss = 0.0;
  for (double v : state.b1) ss += v * v;
  const double dof = m + priors.c;
  state.tau1_sq = draw_scaled_inv_chi2(rng, dof, (ss + priors.c * priors.d) / dof);
}

void cond_draw_tau2_sq(GibbsState& state, const PriorHyperparams& priors, RngState& rng) {
  priors.validate();
  if (state.b2.empty()) throw DomainError("cond_draw_tau2_sq: model has no random slope");
  const double m = static_cast<double>(state.b2.size());
  double ss = 0.0;
  for (double v : state.b2) ss += v * v;
  const double dof = m + priors.slope_dof();
  state.tau2_sq =
      draw_scaled_inv_chi2(rng, dof, (ss + priors.slope_dof() * priors.slope_scale()) / dof);
}

void cond_draw_sigma_eps_sq(GibbsState& state, const DesignMatrices& dm,
                            const PriorHyperparams& priors, RngState& rng) {
  priors.validate();
  check_state(state, dm);
  double rss = 0.0;
  for (std::size_t r = 0; r < dm.n_obs(); ++r) {
    const double resid = dm.y[r] - fixed_part(state, dm, r) - random_part(state, dm, r);
    rss += resid * resid;
  }
  const double dof = static_cast<double>(dm.n_obs()) + priors.a;
  state.sigma_eps_sq = draw_scaled_inv_chi2(rng, dof, (rss + priors.a * priors.b) / dof);
}

GibbsState default_init(const DesignMatrices& dm) {
  const std::size_t p = dm.n_fixed();
  Matrix xtx(p, p, 0.0);
  std::vector<double> xty(p, 0.0);
  for (std::size_t r = 0; r < dm.n_obs(); ++r)
    for (std::size_t jj = 0; jj < p; ++jj) {
      xty[jj] += dm.x(r, jj) * dm.y[r];
      for (std::size_t kk = jj; kk < p; ++kk) xtx(jj, kk) += dm.x(r, jj) * dm.x(r, kk);
    }
  for (std::size_t jj = 0; jj < p; ++jj)
    for (std::size_t kk = 0; kk < jj; ++kk) xtx(jj, kk) = xtx(kk, jj);

  GibbsState state;
  state.beta = solve_spd(xtx, xty);
  state.b1.assign(dm.n_subjects(), 0.0);
  if (dm.random_slope()) state.b2.assign(dm.n_subjects(), 0.0);

  std::vector<double> resid(dm.n_obs());
  for (std::size_t r = 0; r < dm.n_obs(); ++r) {
    double mu = 0.0;
    for (std::size_t jj = 0; jj < p; ++jj) mu += dm.x(r, jj) * state.beta[jj];
    resid[r] = dm.y[r] - mu;
  }
  double var = variance(resid);
  if (!(var > 0.0)) var = 1e-8;  // noise-free data still needs a positive start
  state.tau1_sq = var;
  state.tau2_sq = var;
  state.sigma_eps_sq = var;
  return state;
}

GibbsChain run_gibbs(const DesignMatrices& dm, const PriorHyperparams& priors,
                     std::size_t n_iter, double burn_fraction, std::uint64_t seed,
                     const std::optional<GibbsState>& init) {
  priors.validate();
  if (n_iter < 100) throw DomainError("run_gibbs: n_iter must be >= 100");
  if (!(burn_fraction >= 0.0) || !(burn_fraction < 1.0))
    throw DomainError("run_gibbs: burn_fraction outside [0, 1)");

  const std::size_t p = dm.n_fixed();
  const std::size_t m = dm.n_subjects();
  const bool slope = dm.random_slope();
  const std::size_t retained =
      static_cast<std::size_t>(static_cast<double>(n_iter) * (1.0 - burn_fraction));
  if (retained == 0) throw DomainError("run_gibbs: burn_fraction leaves no retained draws");
  const std::size_t burn = n_iter - retained;

  GibbsState state = init ? *init : default_init(dm);
  check_state(state, dm);

  GibbsChain chain;
  chain.beta_labels = dm.labels;
  chain.has_slope = slope;
  chain.n_iter = n_iter;
  chain.burn_fraction = burn_fraction;
  chain.seed = seed;
  chain.beta = Matrix(retained, p);
  chain.tau1_sq.resize(retained);
  chain.sigma_eps_sq.resize(retained);
  chain.b1 = Matrix(retained, m);
  if (slope) {
    chain.tau2_sq.resize(retained);
    chain.b2 = Matrix(retained, m);
  }

  RngState rng(seed);
  for (std::size_t iter = 0; iter < n_iter; ++iter) {
    try {
      cond_draw_b(state, dm, priors, rng);
      cond_draw_beta(state, dm, priors, rng);
      cond_draw_tau1_sq(state, priors, rng);
      if (slope) cond_draw_tau2_sq(state, priors, rng);
      cond_draw_sigma_eps_sq(state, dm, priors, rng);
    } catch (const Error& e) {
      throw Error("run_gibbs: iteration " + std::to_string(iter) + ": " + e.what());
    }
    if (iter < burn) continue;
    const std::size_t s = iter - burn;
    for (std::size_t jj = 0; jj < p; ++jj) chain.beta(s, jj) = state.beta[jj];
    for (std::size_t si = 0; si < m; ++si) chain.b1(s, si) = state.b1[si];
    chain.tau1_sq[s] = state.tau1_sq;
    chain.sigma_eps_sq[s] = state.sigma_eps_sq;
    if (slope) {
      chain.tau2_sq[s] = state.tau2_sq;
      for (std::size_t si = 0; si < m; ++si) chain.b2(s, si) = state.b2[si];
    }
  }

  auto summarize = [&](const std::string& name, std::span<const double> values) {
    ParamSummary s;
    s.name = name;
    s.mean = mean(values);
    s.sd = std::sqrt(variance(values));
    s.q025 = quantile(values, 0.025);
    s.q975 = quantile(values, 0.975);
    s.ess = effective_sample_size(values);
    chain.summaries.push_back(std::move(s));
  };

  std::vector<double> column(retained);
  for (std::size_t jj = 0; jj < p; ++jj) {
    for (std::size_t s = 0; s < retained; ++s) column[s] = chain.beta(s, jj);
    summarize(chain.beta_labels[jj], column);
  }
  summarize("tau1_sq", chain.tau1_sq);
  if (slope) summarize("tau2_sq", chain.tau2_sq);
  summarize("sigma_eps_sq", chain.sigma_eps_sq);
  return chain;
}

}  // namespace longmix
