#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>

#include "longmix/data/cohort.hpp"

namespace longmix {

struct QuantitativeSummary {
  double mean = 0.0;
  double range = 0.0;  // max - min
  std::optional<double> skewness;  // absent when the series is degenerate
};

// Category counts/percentages and quantitative moments. pCRH and GA are
// summarized over all observations, subject-level covariates over subjects.
struct DescriptiveSummary {
  std::size_t n_subjects = 0;
  std::size_t n_obs = 0;

  std::array<std::size_t, 5> ct_sum_counts{};
  std::array<double, 5> ct_sum_pct{};
  std::array<std::size_t, 2> ob_risk_counts{};  // index = ob_risk value
  std::array<double, 2> ob_risk_pct{};
  std::array<std::size_t, 5> parity_counts{};
  std::array<double, 5> parity_pct{};

  QuantitativeSummary dces;
  QuantitativeSummary bmi;
  QuantitativeSummary cses;
  QuantitativeSummary ga;
  QuantitativeSummary pcrh;
};

DescriptiveSummary describe(const Cohort& cohort);

// Fixed-width console rendering of the summary.
std::string describe_text(const DescriptiveSummary& summary);

}  // namespace longmix
