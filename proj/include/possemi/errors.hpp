#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace possemi {

namespace detail {
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}
}  // namespace detail

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t lhs, std::size_t rhs)
      : Error("dimension mismatch: " + std::to_string(lhs) + " vs " + std::to_string(rhs)) {}
};

class NonFiniteValue : public Error {
 public:
  explicit NonFiniteValue(std::size_t index)
      : Error("non-finite value at index " + std::to_string(index)), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotSquare : public Error {
 public:
  NotSquare(std::size_t rows, std::size_t cols)
      : Error("generator must be square, got " + std::to_string(rows) + "x" + std::to_string(cols)) {}
};

/// The generator violates the positive minimum principle.
class NegativeOffDiagonal : public Error {
 public:
  NegativeOffDiagonal(std::size_t row, std::size_t col, double value)
      : Error("negative off-diagonal entry q(" + std::to_string(row) + "," + std::to_string(col) +
              ") = " + detail::num(value)),
        row_(row),
        col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class Overflow : public Error {
 public:
  using Error::Error;
};

class NonPositiveInput : public Error {
 public:
  NonPositiveInput(std::size_t index, double value)
      : Error("input must be strictly positive, entry " + std::to_string(index) + " = " +
              detail::num(value)),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class RadiusViolation : public Error {
 public:
  RadiusViolation(double radius, double limit)
      : Error("log series radius violation: |e - f| = " + detail::num(radius) + " > " +
              detail::num(limit)) {}
};

class MaxTermsExceeded : public Error {
 public:
  using Error::Error;
};

class DomainViolation : public Error {
 public:
  using Error::Error;
};

/// A theorem hypothesis does not hold for the supplied input.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

class NotNormalized : public HypothesisViolation {
 public:
  explicit NotNormalized(const std::string& generator)
      : HypothesisViolation("generator '" + generator +
                            "' is not conservative, Z(t)e = e does not hold") {}
};

class NonPositiveDual : public HypothesisViolation {
 public:
  explicit NonPositiveDual(std::size_t index)
      : HypothesisViolation("dual vector is not positive at index " + std::to_string(index)) {}
};

/// Exponent midpoint too close to the removable singularities {0, 1} of F_p.
class IllConditionedMidpoint : public Error {
 public:
  explicit IllConditionedMidpoint(double midpoint)
      : Error("exponent midpoint " + detail::num(midpoint) +
              " lies within 1e-6 of {0, 1} but not on it"),
        midpoint_(midpoint) {}
  double midpoint() const noexcept { return midpoint_; }

 private:
  double midpoint_;
};

}  // namespace possemi
