#pragma once

// Brute-force reference computations used only by the tests. Everything here
// is deliberately independent of the library code paths it checks.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      std::size_t panels) {
  const double h = (b - a) / static_cast<double>(2 * panels);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < 2 * panels; ++i)
    acc += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// chi-square CDF by quadrature; the substitution x = t^2 removes the df=1
// singularity at the origin.
inline double chi2_cdf_quadrature(double x, double df) {
  const double norm = std::pow(2.0, df / 2.0) * std::tgamma(df / 2.0);
  auto g = [&](double t) {
    return 2.0 * std::pow(t, df - 1.0) * std::exp(-t * t / 2.0) / norm;
  };
  return simpson(g, 0.0, std::sqrt(x), 20000);
}

inline double normal_cdf_quadrature(double x) {
  auto phi = [](double t) { return std::exp(-t * t / 2.0) / std::sqrt(2.0 * M_PI); };
  if (x >= 0.0) return 0.5 + simpson(phi, 0.0, x, 20000);
  return 0.5 - simpson(phi, x, 0.0, 20000);
}

inline double normal_quantile_bisection(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf_quadrature(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Self-contained dense Cholesky, forward/backward solve, and log-density of
// N(mu, v) for the multivariate-normal oracle.
inline std::vector<std::vector<double>> dense_cholesky(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (d <= 0.0) throw std::runtime_error("oracle cholesky: not PD");
    l[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = s / l[j][j];
    }
  }
  return l;
}

inline double mvn_logpdf(const std::vector<double>& x, const std::vector<double>& mu,
                         const std::vector<std::vector<double>>& v) {
  const std::size_t n = x.size();
  const auto l = dense_cholesky(v);
  std::vector<double> y(n);
  double logdet = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i] - mu[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * y[k];
    y[i] = s / l[i][i];
    logdet += 2.0 * std::log(l[i][i]);
  }
  double quad = 0.0;
  for (double v_i : y) quad += v_i * v_i;
  return -0.5 * (static_cast<double>(n) * std::log(2.0 * M_PI) + logdet + quad);
}

// Closed-form REML variance components for a balanced one-way layout with an
// intercept-only fixed effect: sigma2 = MSE, tau2 = (MSA - MSE) / reps.
struct OneWayAnova {
  double msa = 0.0;
  double mse = 0.0;
  double tau_sq = 0.0;
  double sigma_sq = 0.0;
};

inline OneWayAnova oneway_anova(const std::vector<std::vector<double>>& groups) {
  const std::size_t m = groups.size();
  const std::size_t r = groups[0].size();
  double grand = 0.0;
  std::vector<double> group_mean(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (double v : groups[i]) group_mean[i] += v;
    group_mean[i] /= static_cast<double>(r);
    grand += group_mean[i];
  }
  grand /= static_cast<double>(m);

  double ssa = 0.0, sse = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    ssa += (group_mean[i] - grand) * (group_mean[i] - grand);
    for (double v : groups[i]) sse += (v - group_mean[i]) * (v - group_mean[i]);
  }
  OneWayAnova out;
  out.msa = static_cast<double>(r) * ssa / static_cast<double>(m - 1);
  out.mse = sse / static_cast<double>(m * (r - 1));
  out.sigma_sq = out.mse;
  out.tau_sq = (out.msa - out.mse) / static_cast<double>(r);
  return out;
}

}  // namespace oracles
