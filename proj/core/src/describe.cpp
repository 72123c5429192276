#include "longmix/data/describe.hpp"

#include <algorithm>
#include <cstdio>
#include <span>
#include <vector>

#include "longmix/errors.hpp"
#include "longmix/numerics/series.hpp"

namespace longmix {

namespace {

QuantitativeSummary summarize(std::span<const double> values) {
  QuantitativeSummary q;
  q.mean = mean(values);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  q.range = *hi - *lo;
  if (values.size() >= 3 && variance(values) > 0.0) q.skewness = sample_skewness(values);
  return q;
}

}  // namespace

DescriptiveSummary describe(const Cohort& cohort) {
  if (cohort.subjects.empty()) throw EmptyCohort("describe: empty cohort");

  DescriptiveSummary s;
  s.n_subjects = cohort.subjects.size();
  s.n_obs = cohort.n_obs();

  std::vector<double> dces, bmi, cses, ga, pcrh;
  for (const auto& subject : cohort.subjects) {
    s.ct_sum_counts[static_cast<std::size_t>(subject.ct_sum)]++;
    s.ob_risk_counts[static_cast<std::size_t>(subject.ob_risk)]++;
    s.parity_counts[static_cast<std::size_t>(subject.parity)]++;
    dces.push_back(subject.dces);
    bmi.push_back(subject.bmi);
    cses.push_back(subject.cses);
    for (const auto& v : subject.visits) {
      ga.push_back(v.ga_weeks);
      pcrh.push_back(v.pcrh);
    }
  }

  const double m = static_cast<double>(s.n_subjects);
  for (std::size_t i = 0; i < 5; ++i) s.ct_sum_pct[i] = 100.0 * s.ct_sum_counts[i] / m;
  for (std::size_t i = 0; i < 2; ++i) s.ob_risk_pct[i] = 100.0 * s.ob_risk_counts[i] / m;
  for (std::size_t i = 0; i < 5; ++i) s.parity_pct[i] = 100.0 * s.parity_counts[i] / m;

  s.dces = summarize(dces);
  s.bmi = summarize(bmi);
  s.cses = summarize(cses);
  s.ga = summarize(ga);
  s.pcrh = summarize(pcrh);
  return s;
}

std::string describe_text(const DescriptiveSummary& s) {
  std::string out;
  char buf[160];
  auto row = [&](const char* label, std::size_t count, double pct) {
    std::snprintf(buf, sizeof(buf), "  %-28s %6zu  %5.1f%%\n", label, count, pct);
    out += buf;
  };
  auto qrow = [&](const char* label, const QuantitativeSummary& q) {
    if (q.skewness)
      std::snprintf(buf, sizeof(buf), "  %-28s %10.2f %10.2f %10.2f\n", label, q.mean,
                    q.range, *q.skewness);
    else
      std::snprintf(buf, sizeof(buf), "  %-28s %10.2f %10.2f %10s\n", label, q.mean,
                    q.range, "-");
    out += buf;
  };

  std::snprintf(buf, sizeof(buf), "Cohort: %zu subjects, %zu observations\n\n",
                s.n_subjects, s.n_obs);
  out += buf;

  out += "Categorical variables          count    pct\n";
  static const char* ct_labels[] = {"ct_sum=0", "ct_sum=1", "ct_sum=2", "ct_sum=3",
                                    "ct_sum=4"};
  for (std::size_t i = 0; i < 5; ++i) row(ct_labels[i], s.ct_sum_counts[i], s.ct_sum_pct[i]);
  row("ob_risk=1 (high)", s.ob_risk_counts[1], s.ob_risk_pct[1]);
  row("ob_risk=0 (low)", s.ob_risk_counts[0], s.ob_risk_pct[0]);
  static const char* par_labels[] = {"parity=0", "parity=1", "parity=2", "parity=3",
                                     "parity=4"};
  for (std::size_t i = 0; i < 5; ++i)
    row(par_labels[i], s.parity_counts[i], s.parity_pct[i]);

  out += "\nQuantitative variables              mean      range   skewness\n";
  qrow("dces", s.dces);
  qrow("bmi", s.bmi);
  qrow("cses", s.cses);
  qrow("ga_weeks", s.ga);
  qrow("pcrh", s.pcrh);
  return out;
}

}  // namespace longmix
