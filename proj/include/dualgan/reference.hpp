#pragma once

#include <functional>

#include "dualgan/types.hpp"

namespace dualgan {

/// Reference descent routines used for verification: plain first-order
/// minimizers that never touch the dual solvers they are compared against.

using ValueGrad = std::function<double(const Vector& x, Vector& grad)>;

struct DescentResult {
  Vector x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Unconstrained gradient descent with an adaptive (Barzilai-Borwein) step
/// and a monotone backtracking safeguard; stops at |grad|_inf <= tol.
DescentResult reference_descent(const ValueGrad& f, Vector x0, double tol, int max_iter);

/// Projected gradient descent on the ball {0.5 |s|^2 <= delta}; stops when
/// the projected step is below tol.
DescentResult reference_descent_ball(const ValueGrad& f, Vector x0, double delta, double tol,
                                     int max_iter);

}  // namespace dualgan
