#pragma once

#include <utility>
#include <vector>

#include "longmix/lmm/lmm.hpp"
#include "longmix/numerics/series.hpp"

namespace longmix {

// Conditional fitted values X beta + Z b, one per observation in design row
// order.
std::vector<double> fitted_values(const LmmFit& fit, const DesignMatrices& dm);

// Conditional residuals (y - X beta - Z b) / sigma_eps, one per observation
// in design row order. A zero-variance fit returns the raw residuals.
Series pearson_residuals(const LmmFit& fit, const DesignMatrices& dm);

// Sorted residuals paired with normal quantiles at (i - 0.5) / n.
// Throws DegenerateInput for constant input.
std::vector<std::pair<double, double>> qq_points(const Series& residuals);

}  // namespace longmix
