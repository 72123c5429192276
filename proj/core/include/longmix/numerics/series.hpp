#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace longmix {

// Ordered sequence of reals: MCMC traces, residuals, per-visit measurements.
using Series = std::vector<double>;

double mean(std::span<const double> s);

// Central second moment with denominator n.
double variance(std::span<const double> s);

// m3 / m2^(3/2) with central moments m_k (moment-estimator convention).
// Needs length >= 3 and nonzero variance.
double sample_skewness(std::span<const double> s);

// Autocorrelation for lags 0..max_lag, denominator the lag-0 autocovariance,
// so result[0] == 1 exactly. Needs length > max_lag and nonzero variance.
std::vector<double> acf(std::span<const double> s, std::size_t max_lag);

// Empirical quantile with linear interpolation between order statistics.
double quantile(std::span<const double> s, double p);

// n / (1 + 2 sum of the leading positive autocorrelations), autocorrelations
// taken to lag min(max_lag, n - 1) and truncated at the first non-positive.
double effective_sample_size(std::span<const double> s, std::size_t max_lag = 50);

}  // namespace longmix
