#pragma once

#include <stdexcept>
#include <string>

namespace tccopula {

/// A precondition on an argument or configuration was violated.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The two clock values passed to a gradient are too close to separate
/// numerically; the copula is on its diagonal branch there.
class NearDiagonalError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double estimate, double abs_error)
      : std::runtime_error(what), estimate_(estimate), abs_error_(abs_error) {}

  double estimate() const noexcept { return estimate_; }
  double abs_error() const noexcept { return abs_error_; }

 private:
  double estimate_;
  double abs_error_;
};

/// A file could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tccopula
