#include "dualgan/opt_core.hpp"

#include <cmath>
#include <string>

namespace dualgan {

namespace {

// |nu| cap keeping sigma(nu) and 1 - sigma(nu) representable in double;
// the induced lambda clipping is below every tolerance used in the repo.
constexpr double kNuClip = 34.0;

Vector to_logits(const Vector& lambda, double box_hi) {
  Vector nu(lambda.size());
  for (int i = 0; i < lambda.size(); ++i) {
    const double u = lambda[i] / box_hi;
    if (!(u > 0.0 && u < 1.0)) {
      throw ValidationError("solve_box_concave: init must be strictly inside the box");
    }
    nu[i] = std::clamp(std::log(u / (1.0 - u)), -kNuClip, kNuClip);
  }
  return nu;
}

Vector to_lambda(const Vector& nu, double box_hi) {
  Vector lambda(nu.size());
  for (int i = 0; i < nu.size(); ++i) lambda[i] = box_hi * sigmoid(nu[i]);
  return lambda;
}

}  // namespace

BoxSolveResult solve_box_concave(const BoxReparamProblem& problem, const Vector& init,
                                 const SolveOptions& opts) {
  if (problem.dimension <= 0 || init.size() != problem.dimension) {
    throw ValidationError("solve_box_concave: dimension mismatch");
  }
  if (!(problem.box_hi > 0.0)) {
    throw ValidationError("solve_box_concave: box_hi must be positive");
  }
  if (!(opts.tol > 0.0)) {
    throw ValidationError("solve_box_concave: tol must be positive");
  }
  const double box = problem.box_hi;
  const bool precondition = opts.precondition && static_cast<bool>(problem.curvature_diag);

  Vector nu = to_logits(init, box);
  Vector lambda = to_lambda(nu, box);
  Vector grad_l(problem.dimension);
  double value = problem.objective(lambda, grad_l);
  if (!std::isfinite(value) || !grad_l.allFinite()) {
    throw NumericalError("solve_box_concave: non-finite objective or gradient at init");
  }

  Vector sprime(problem.dimension), grad_nu(problem.dimension), direction(problem.dimension);
  Vector curv(problem.dimension);
  Vector nu_prev, grad_nu_prev;
  double bb_step = 1.0;

  SolveReport report;
  for (int it = 0; it < opts.max_iter; ++it) {
    for (int i = 0; i < problem.dimension; ++i) {
      const double u = sigmoid(nu[i]);
      sprime[i] = u * (1.0 - u);
    }
    grad_nu = (grad_l.array() * sprime.array()).matrix() * box;
    const double gnorm = grad_nu.norm();
    report.iterations = it;
    report.final_grad_norm = gnorm;
    if (gnorm <= opts.tol) {
      report.converged = true;
      break;
    }

    double init_step = 1.0;
    if (precondition) {
      problem.curvature_diag(lambda, curv);
      for (int i = 0; i < problem.dimension; ++i) {
        const double d = std::max(box * box * sprime[i] * sprime[i] * curv[i], 1e-300);
        direction[i] = grad_nu[i] / d;
      }
    } else {
      direction = grad_nu;
      if (nu_prev.size() > 0) {
        // Barzilai-Borwein step from the last accepted move
        const Vector s = nu - nu_prev;
        const Vector y = grad_nu_prev - grad_nu;
        const double sy = s.dot(y);
        if (sy > 0.0) bb_step = s.squaredNorm() / sy;
      } else {
        bb_step = 1.0 / std::max(gnorm, 1.0);
      }
      init_step = std::clamp(bb_step, 1e-12, 1e12);
    }

    nu_prev = nu;
    grad_nu_prev = grad_nu;

    double step = init_step;
    bool accepted = false;
    Vector nu_trial(problem.dimension), lambda_trial, grad_trial(problem.dimension);
    for (int bt = 0; bt <= opts.backtrack_budget; ++bt) {
      nu_trial = (nu + step * direction).cwiseMax(-kNuClip).cwiseMin(kNuClip);
      if ((nu_trial - nu).squaredNorm() == 0.0) {
        step *= opts.backtrack_shrink;
        continue;
      }
      lambda_trial = to_lambda(nu_trial, box);
      const double trial = problem.objective(lambda_trial, grad_trial);
      if (!std::isfinite(trial) || !grad_trial.allFinite()) {
        throw NumericalError("solve_box_concave: non-finite objective or gradient at iteration " +
                             std::to_string(it));
      }
      const double predicted = grad_nu.dot(nu_trial - nu);
      if (trial >= value && trial >= value + 1e-4 * std::max(predicted, 0.0)) {
        nu = nu_trial;
        lambda = lambda_trial;
        grad_l = grad_trial;
        value = trial;
        accepted = true;
        break;
      }
      step *= opts.backtrack_shrink;
    }
    if (!accepted) {
      // no improving step representable; report current point
      break;
    }
  }

  report.objective_value = value;
  return {lambda, report};
}

double backtracking_linesearch(const std::function<double(const Vector&)>& f, const Vector& x,
                               const Vector& direction, double init_step, double shrink,
                               int budget) {
  const double f0 = f(x);
  if (!std::isfinite(f0)) {
    throw NumericalError("backtracking_linesearch: non-finite value at start point");
  }
  if (direction.norm() == 0.0 || init_step <= 0.0) return 0.0;

  double step = init_step;
  for (int i = 0; i <= budget; ++i) {
    const double trial = f(x + step * direction);
    if (!std::isfinite(trial)) {
      throw NumericalError("backtracking_linesearch: non-finite trial value");
    }
    if (trial >= f0) return step;
    step *= shrink;
  }
  return 0.0;
}

double solve_lambda_T(const std::function<std::pair<double, double>(double)>& g_restricted,
                      double tol) {
  auto deriv = [&](double t) {
    const auto [v, d] = g_restricted(t);
    if (!std::isfinite(v) || !std::isfinite(d)) {
      throw NumericalError("solve_lambda_T: non-finite evaluation at lambda_T=" +
                           std::to_string(t));
    }
    return d;
  };

  const double d0 = deriv(0.0);
  if (d0 <= 0.0) return 0.0;

  double lo = 0.0, d_lo = d0;
  double hi = 1.0;
  double d_hi = deriv(hi);
  int expansions = 0;
  while (d_hi > 0.0) {
    if (++expansions > 200) {
      throw NumericalError("solve_lambda_T: derivative stays positive, dual unbounded");
    }
    lo = hi;
    d_lo = d_hi;
    hi *= 2.0;
    d_hi = deriv(hi);
  }

  // concave g => derivative is decreasing; bisect with a secant candidate
  for (int it = 0; it < 300; ++it) {
    if (hi - lo <= tol * (1.0 + hi)) break;
    double mid = 0.5 * (lo + hi);
    if (d_lo > d_hi) {
      const double secant = lo + d_lo * (hi - lo) / (d_lo - d_hi);
      const double margin = 0.01 * (hi - lo);
      if (secant > lo + margin && secant < hi - margin) mid = secant;
    }
    const double d_mid = deriv(mid);
    if (std::abs(d_mid) <= 1e-14) return mid;
    if (d_mid > 0.0) {
      lo = mid;
      d_lo = d_mid;
    } else {
      hi = mid;
      d_hi = d_mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace dualgan
