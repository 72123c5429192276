#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace longmix {

// Observed gestational-age window of the study design.
inline constexpr double kGaMin = 14.0;
inline constexpr double kGaMax = 40.0;

struct Visit {
  double ga_weeks = 0.0;  // gestational age in weeks, within [kGaMin, kGaMax]
  double pcrh = 0.0;      // hormone concentration in pg/mL, strictly positive
};

struct Subject {
  std::string id;
  int ct_sum = 0;    // childhood-trauma category count, 0..4
  double bmi = 0.0;  // kg/m^2, > 0
  double cses = 0.0;
  double dces = 0.0;
  int ob_risk = 0;  // 0/1
  int parity = 0;   // 0..4
  std::vector<Visit> visits;  // sorted by ga_weeks, strictly increasing
};

struct Cohort {
  std::vector<Subject> subjects;

  std::size_t n_obs() const {
    std::size_t n = 0;
    for (const auto& s : subjects) n += s.visits.size();
    return n;
  }
};

}  // namespace longmix
