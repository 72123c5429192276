#include "longmix/lmm/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "longmix/errors.hpp"
#include "longmix/numerics/special.hpp"

namespace longmix {

std::vector<double> fitted_values(const LmmFit& fit, const DesignMatrices& dm) {
  if (dm.n_fixed() != fit.beta.size() || dm.n_subjects() != fit.blups.rows())
    throw DomainError("fitted_values: fit does not match design");
  std::vector<double> out(dm.n_obs());
  for (std::size_t r = 0; r < dm.n_obs(); ++r) {
    double mu = 0.0;
    for (std::size_t j = 0; j < dm.n_fixed(); ++j) mu += dm.x(r, j) * fit.beta[j];
    const std::size_t si = dm.subject_of_row[r];
    mu += fit.blups(si, 0);
    if (dm.random_slope()) mu += fit.blups(si, 1) * dm.ga[r];
    out[r] = mu;
  }
  return out;
}

Series pearson_residuals(const LmmFit& fit, const DesignMatrices& dm) {
  const std::vector<double> fitted = fitted_values(fit, dm);

  // Guard the degenerate zero-variance fit (0/0 otherwise).
  const double scale = fit.vc.sigma_eps_sq > 1e-20 ? std::sqrt(fit.vc.sigma_eps_sq) : 1.0;

  Series out(dm.n_obs());
  for (std::size_t r = 0; r < dm.n_obs(); ++r) out[r] = (dm.y[r] - fitted[r]) / scale;
  return out;
}

std::vector<std::pair<double, double>> qq_points(const Series& residuals) {
  if (residuals.size() < 3) throw DegenerateInput("qq_points: need at least 3 values");
  if (variance(residuals) <= 0.0) throw DegenerateInput("qq_points: constant input");

  Series sorted = residuals;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<std::pair<double, double>> points;
  points.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double p = (static_cast<double>(i) + 0.5) / n;
    points.emplace_back(normal_quantile(p), sorted[i]);
  }
  return points;
}

}  // namespace longmix
