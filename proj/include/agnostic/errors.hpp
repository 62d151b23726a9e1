#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace agnostic {

/// Argument outside the mathematical domain of a function (non-finite input,
/// probability at 0 or 1 where a quantile would be infinite, df <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// alpha + beta > 1 where the accept and reject regions would overlap.
class InvalidBudget : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Zero sample variance, zero residual variance, and similar degenerate data.
class DegenerateData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rank-deficient design or contrast matrix.
class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method failed or produced a value outside its range.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested exact enumeration exceeds the configured cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration that would violate a cut-rule or region invariant.
class InvalidConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// CSV ingestion failure. `row` and `column` are 1-based positions in the
/// file (row 1 is the header); 0 means "not applicable".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : std::runtime_error(what), row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace agnostic
