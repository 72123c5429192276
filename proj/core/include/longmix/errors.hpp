#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace longmix {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A Cholesky pivot was non-positive: the matrix (or an implied covariance)
// is degenerate.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

// Input with no usable variation (constant series, zero variance).
struct DegenerateInput : Error {
  using Error::Error;
};

// Fixed-effect design columns are linearly dependent.
struct RankDeficient : Error {
  using Error::Error;
};

// Null model is not nested in the alternative.
struct NotNested : Error {
  using Error::Error;
};

struct EmptyCohort : Error {
  using Error::Error;
};

// Malformed input file. `line` is 1-based, 0 when not tied to a line.
struct ParseError : Error {
  std::size_t line;
  ParseError(std::size_t line_, const std::string& what_)
      : Error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
  explicit ParseError(const std::string& what_) : Error(what_), line(0) {}
};

// Well-formed input that violates a data invariant.
struct ValidationError : Error {
  std::size_t line;
  ValidationError(std::size_t line_, const std::string& what_)
      : Error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
  explicit ValidationError(const std::string& what_) : Error(what_), line(0) {}
};

// Optimizer or test statistic failure; carries the iteration count and the
// last objective change (or gradient norm) seen.
struct ConvergenceFailure : Error {
  std::size_t iterations;
  double last_delta;
  ConvergenceFailure(const std::string& what_, std::size_t iterations_, double last_delta_)
      : Error(what_ + " (iterations=" + std::to_string(iterations_) +
              ", last_delta=" + std::to_string(last_delta_) + ")"),
        iterations(iterations_),
        last_delta(last_delta_) {}
};

}  // namespace longmix
