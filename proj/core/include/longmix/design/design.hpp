#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "longmix/data/cohort.hpp"
#include "longmix/design/model_spec.hpp"
#include "longmix/numerics/matrix.hpp"

namespace longmix {

// Realized design. Rows follow cohort iteration order (subject by subject,
// visits ascending). The per-subject random design is the intercept column
// and, when the model spec carries a random slope, the raw GA column.
struct DesignMatrices {
  ModelSpec spec;
  std::vector<double> y;   // log(pcrh), length N
  Matrix x;                // N x p, columns ordered as spec.fixed_terms
  std::vector<std::string> labels;  // p column labels
  std::vector<double> ga;  // length N, random-slope regressor
  std::vector<std::size_t> subject_of_row;                      // length N
  std::vector<std::pair<std::size_t, std::size_t>> subject_rows;  // [begin, end) per subject
  std::vector<std::string> subject_ids;

  std::size_t n_obs() const { return y.size(); }
  std::size_t n_subjects() const { return subject_rows.size(); }
  std::size_t n_fixed() const { return x.cols(); }
  bool random_slope() const { return spec.has_random_slope(); }
};

// Throws RankDeficient when the fixed columns are linearly dependent
// (pivoted Cholesky of X^T X, pivot threshold 1e-8 x max diagonal).
DesignMatrices build_design(const Cohort& cohort, const ModelSpec& spec);

}  // namespace longmix
