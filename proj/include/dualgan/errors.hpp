#pragma once

#include <stdexcept>
#include <string>

namespace dualgan {

// Bad user input (config, shapes, parameter ranges). CLI exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical breakdown: non-finite values, solver failure. CLI exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Trust-region model predicts no measurable decrease; caller shrinks the radius.
struct DegenerateModel : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace dualgan
