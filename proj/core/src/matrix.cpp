#include "longmix/numerics/matrix.hpp"

#include <cmath>
#include <cstddef>

#include "longmix/errors.hpp"

namespace longmix {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {
  if (!std::isfinite(fill)) throw DomainError("matrix fill value must be finite");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw DomainError("ragged row list");
    std::size_t j = 0;
    for (double v : row) {
      if (!std::isfinite(v)) throw DomainError("matrix entry must be finite");
      m(i, j++) = v;
    }
    ++i;
  }
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DomainError("matmul: dimension mismatch");
  Matrix out(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
  if (a.cols() != x.size()) throw DomainError("matvec: dimension mismatch");
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    out[i] = acc;
  }
  return out;
}

Matrix cholesky(const Matrix& m, const Tolerances& tol) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw DomainError("cholesky: matrix not square");

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(m(i, i))) throw DomainError("cholesky: non-finite entry");
    scale = std::max(scale, std::fabs(m(i, i)));
  }
  if (scale == 0.0) scale = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!std::isfinite(m(i, j)) || !std::isfinite(m(j, i)))
        throw DomainError("cholesky: non-finite entry");
      if (std::fabs(m(i, j) - m(j, i)) > tol.symmetry * scale)
        throw DomainError("cholesky: matrix not symmetric within tolerance");
    }

  Matrix l(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > tol.min_pivot * scale))
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(d) + " at column " +
                                std::to_string(j));
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

std::vector<double> solve_lower(const Matrix& l, const std::vector<double>& b) {
  const std::size_t n = l.rows();
  if (b.size() != n) throw DomainError("solve_lower: dimension mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  return y;
}

std::vector<double> solve_lower_transpose(const Matrix& l, const std::vector<double>& b) {
  const std::size_t n = l.rows();
  if (b.size() != n) throw DomainError("solve_lower_transpose: dimension mismatch");
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

Matrix solve_spd(const Matrix& m, const Matrix& b, const Tolerances& tol) {
  if (b.rows() != m.rows()) throw DomainError("solve_spd: dimension mismatch");
  const Matrix l = cholesky(m, tol);
  Matrix x(b.rows(), b.cols());
  std::vector<double> col(b.rows());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
    const std::vector<double> y = solve_lower(l, col);
    const std::vector<double> xc = solve_lower_transpose(l, y);
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = xc[i];
  }
  return x;
}

std::vector<double> solve_spd(const Matrix& m, const std::vector<double>& b,
                              const Tolerances& tol) {
  const Matrix l = cholesky(m, tol);
  return solve_lower_transpose(l, solve_lower(l, b));
}

double log_det_from_cholesky(const Matrix& l) {
  double acc = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

}  // namespace longmix
