#include "longmix/design/design.hpp"

#include <algorithm>
#include <cmath>

#include "longmix/errors.hpp"

namespace longmix {

namespace {

double term_value(FixedTerm t, const Subject& s, const Visit& v, double knot) {
  switch (t) {
    case FixedTerm::Intercept: return 1.0;
    case FixedTerm::GA: return v.ga_weeks;
    case FixedTerm::CTSum: return static_cast<double>(s.ct_sum);
    case FixedTerm::CTSumGA: return static_cast<double>(s.ct_sum) * v.ga_weeks;
    case FixedTerm::BMI: return s.bmi;
    case FixedTerm::CSES: return s.cses;
    case FixedTerm::DCES: return s.dces;
    case FixedTerm::OBRisk: return static_cast<double>(s.ob_risk);
    case FixedTerm::Parity: return static_cast<double>(s.parity);
    case FixedTerm::Hinge: return std::max(v.ga_weeks - knot, 0.0);
    case FixedTerm::Jump: return v.ga_weeks > knot ? 1.0 : 0.0;
  }
  return 0.0;
}

// Pivoted Cholesky rank check on X^T X.
void check_full_rank(const Matrix& x, const std::vector<std::string>& labels) {
  const std::size_t p = x.cols();
  Matrix g(p, p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < x.rows(); ++r) acc += x(r, i) * x(r, j);
      g(i, j) = acc;
      g(j, i) = acc;
    }

  double max_diag = 0.0;
  for (std::size_t i = 0; i < p; ++i) max_diag = std::max(max_diag, g(i, i));
  const double threshold = 1e-8 * max_diag;

  std::vector<std::size_t> perm(p);
  for (std::size_t i = 0; i < p; ++i) perm[i] = i;
  Matrix a = g;
  for (std::size_t k = 0; k < p; ++k) {
    std::size_t best = k;
    for (std::size_t i = k + 1; i < p; ++i)
      if (a(perm[i], perm[i]) > a(perm[best], perm[best])) best = i;
    std::swap(perm[k], perm[best]);
    const std::size_t pk = perm[k];
    const double pivot = a(pk, pk);
    if (!(pivot > threshold))
      throw RankDeficient("design: column '" + labels[pk] + "' is linearly dependent");
    for (std::size_t i = k + 1; i < p; ++i) {
      const std::size_t pi = perm[i];
      const double f = a(pi, pk) / pivot;
      for (std::size_t j = i; j < p; ++j) {
        const std::size_t pj = perm[j];
        a(pi, pj) -= f * a(pk, pj);
        a(pj, pi) = a(pi, pj);
      }
    }
  }
}

}  // namespace

DesignMatrices build_design(const Cohort& cohort, const ModelSpec& spec) {
  spec.validate();
  if (cohort.subjects.empty()) throw EmptyCohort("build_design: empty cohort");

  const std::size_t n = cohort.n_obs();
  const std::size_t p = spec.fixed_terms.size();
  if (n <= p)
    throw ValidationError("build_design: " + std::to_string(n) + " observations cannot fit " +
                          std::to_string(p) + " fixed-effect columns");

  DesignMatrices dm;
  dm.spec = spec;
  dm.y.reserve(n);
  dm.ga.reserve(n);
  dm.x = Matrix(n, p);
  for (FixedTerm t : spec.fixed_terms) dm.labels.push_back(term_label(t, spec.knot));

  std::size_t row = 0;
  for (std::size_t si = 0; si < cohort.subjects.size(); ++si) {
    const Subject& s = cohort.subjects[si];
    if (s.visits.empty()) throw ValidationError("build_design: subject '" + s.id + "' has no visits");
    const std::size_t begin = row;
    for (const Visit& v : s.visits) {
      if (!(v.pcrh > 0.0))
        throw ValidationError("build_design: pcrh must be > 0 for subject '" + s.id + "'");
      dm.y.push_back(std::log(v.pcrh));
      dm.ga.push_back(v.ga_weeks);
      for (std::size_t j = 0; j < p; ++j)
        dm.x(row, j) = term_value(spec.fixed_terms[j], s, v, spec.knot);
      dm.subject_of_row.push_back(si);
      ++row;
    }
    dm.subject_rows.emplace_back(begin, row);
    dm.subject_ids.push_back(s.id);
  }

  check_full_rank(dm.x, dm.labels);
  return dm;
}

}  // namespace longmix
