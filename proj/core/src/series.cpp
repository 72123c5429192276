#include "longmix/numerics/series.hpp"

#include <algorithm>
#include <cmath>

#include "longmix/errors.hpp"

namespace longmix {

double mean(std::span<const double> s) {
  if (s.empty()) throw DegenerateInput("mean: empty series");
  double acc = 0.0;
  for (double v : s) acc += v;
  return acc / static_cast<double>(s.size());
}

double variance(std::span<const double> s) {
  const double m = mean(s);
  double acc = 0.0;
  for (double v : s) acc += (v - m) * (v - m);
  return acc / static_cast<double>(s.size());
}

double sample_skewness(std::span<const double> s) {
  if (s.size() < 3) throw DegenerateInput("sample_skewness: need at least 3 values");
  const double m = mean(s);
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : s) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double n = static_cast<double>(s.size());
  m2 /= n;
  m3 /= n;
  if (m2 <= 0.0) throw DegenerateInput("sample_skewness: zero variance");
  return m3 / std::pow(m2, 1.5);
}

std::vector<double> acf(std::span<const double> s, std::size_t max_lag) {
  if (s.size() <= max_lag) throw DegenerateInput("acf: series shorter than max_lag + 1");
  const double m = mean(s);
  double c0 = 0.0;
  for (double v : s) c0 += (v - m) * (v - m);
  if (c0 <= 0.0) throw DegenerateInput("acf: zero variance");

  std::vector<double> out(max_lag + 1);
  out[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = k; t < s.size(); ++t) ck += (s[t] - m) * (s[t - k] - m);
    out[k] = ck / c0;
  }
  return out;
}

double effective_sample_size(std::span<const double> s, std::size_t max_lag) {
  const std::size_t lag = std::min(max_lag, s.size() - 1);
  const std::vector<double> rho = acf(s, lag);
  double acc = 0.0;
  for (std::size_t k = 1; k < rho.size(); ++k) {
    if (rho[k] <= 0.0) break;
    acc += rho[k];
  }
  return static_cast<double>(s.size()) / (1.0 + 2.0 * acc);
}

double quantile(std::span<const double> s, double p) {
  if (s.empty()) throw DegenerateInput("quantile: empty series");
  if (!(p >= 0.0) || !(p <= 1.0)) throw DomainError("quantile: p outside [0, 1]");
  std::vector<double> sorted(s.begin(), s.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace longmix
