#pragma once

#include <stdexcept>
#include <string>

namespace expectail {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument or precondition violation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Sample has no usable information for the requested fit
/// (e.g. all exceedances identical).
class DegenerateSampleError : public Error {
 public:
  explicit DegenerateSampleError(const std::string& msg) : Error(msg) {}
};

/// An iterative fit failed to locate a feasible optimum.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

/// Extrapolation requested in an invalid direction or regime
/// (e.g. p >= k/n, infinite endpoint, ordering violations).
class ExtrapolationError : public Error {
 public:
  explicit ExtrapolationError(const std::string& msg) : Error(msg) {}
};

/// Input data failed validation (parsing, schema, monotonicity).
class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

}  // namespace expectail
