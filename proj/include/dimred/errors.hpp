// Error types shared by every module. The CLI maps ValidationError to exit
// code 1 and NumericalError to exit code 2.
#pragma once

#include <stdexcept>
#include <string>

namespace dimred {

/// Input rejected before any numerical work (bad parameters, shape mismatch).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation started but produced an unusable result (NaN, blow-up,
/// non-convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace dimred
