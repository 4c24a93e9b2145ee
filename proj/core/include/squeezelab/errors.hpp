#pragma once

#include <stdexcept>
#include <string>

namespace squeezelab {

// Raised when an argument violates a documented precondition. The message is
// meant to be shown to users verbatim.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The inverse problem has fewer independent observations than free parameters.
class UnderDeterminedError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

inline void require_fraction(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ValidationError(std::string(name) + " must lie in [0, 1], got " +
                          std::to_string(value));
  }
}

}  // namespace detail
}  // namespace squeezelab
