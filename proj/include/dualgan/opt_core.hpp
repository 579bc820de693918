#pragma once

#include <functional>
#include <utility>

#include "dualgan/errors.hpp"
#include "dualgan/types.hpp"

namespace dualgan {

/// Concave objective over the open box (0, box_hi)^dim. The solver works in
/// logit coordinates lambda_i = box_hi * sigmoid(nu_i), which turns the box
/// into an unconstrained smooth problem; entropy-style terms keep the optimum
/// strictly interior.
struct BoxReparamProblem {
  int dimension = 0;
  double box_hi = 0.0;
  // value and gradient in lambda coordinates
  std::function<double(const Vector& lambda, Vector& grad)> objective;
  // optional per-coordinate upper bound on -d2g/dlambda_i^2; enables the
  // diagonally preconditioned ascent variant
  std::function<void(const Vector& lambda, Vector& curvature)> curvature_diag;
};

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 5000;
  double backtrack_shrink = 0.5;
  int backtrack_budget = 50;
  bool precondition = false;
};

struct SolveReport {
  int iterations = 0;
  double final_grad_norm = 0.0;  // reparametrized coordinates
  bool converged = false;
  double objective_value = 0.0;
};

struct BoxSolveResult {
  Vector lambda;
  SolveReport report;
};

BoxSolveResult solve_box_concave(const BoxReparamProblem& problem, const Vector& init,
                                 const SolveOptions& opts = {});

/// Largest step in {init, shrink*init, ...} that does not decrease f;
/// returns 0 when no improvement is found within the shrink budget.
double backtracking_linesearch(const std::function<double(const Vector&)>& f, const Vector& x,
                               const Vector& direction, double init_step, double shrink = 0.5,
                               int budget = 50);

/// Maximize a concave differentiable 1-D function over lambda_T >= 0.
/// g_restricted returns (value, derivative). Result is 0 when the derivative
/// at 0+ is non-positive, otherwise the root of the derivative found by
/// safeguarded bisection.
double solve_lambda_T(const std::function<std::pair<double, double>(double)>& g_restricted,
                      double tol = 1e-10);

}  // namespace dualgan
