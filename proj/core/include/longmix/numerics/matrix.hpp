#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace longmix {

// Tolerances shared by the dense linear-algebra routines. One record so the
// handling of near-degenerate fits is tuned in a single place.
struct Tolerances {
  double symmetry = 1e-10;   // allowed |a_ij - a_ji| relative to matrix scale
  double min_pivot = 1e-12;  // Cholesky pivot at or below this is non-PD
};

// Dense row-major matrix. Entries are validated finite on construction from
// data; operations keep them finite or throw.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  const std::vector<double>& entries() const { return entries_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);

// Lower-triangular Cholesky factor L with m = L L^T. Requires symmetry within
// tol.symmetry (relative to the largest diagonal entry) and positive pivots.
Matrix cholesky(const Matrix& m, const Tolerances& tol = {});

// Solve m x = b for SPD m via Cholesky. b may hold multiple right-hand sides.
Matrix solve_spd(const Matrix& m, const Matrix& b, const Tolerances& tol = {});
std::vector<double> solve_spd(const Matrix& m, const std::vector<double>& b,
                              const Tolerances& tol = {});

// Triangular substitutions against a lower factor L.
std::vector<double> solve_lower(const Matrix& l, const std::vector<double>& b);
std::vector<double> solve_lower_transpose(const Matrix& l, const std::vector<double>& b);

// log|m| for SPD m given its Cholesky factor.
double log_det_from_cholesky(const Matrix& l);

}  // namespace longmix
