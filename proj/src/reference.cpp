#include "dualgan/reference.hpp"

#include <cmath>

#include "dualgan/errors.hpp"

namespace dualgan {

DescentResult reference_descent(const ValueGrad& f, Vector x0, double tol, int max_iter) {
  Vector x = std::move(x0);
  Vector grad(x.size());
  double value = f(x, grad);
  if (!std::isfinite(value)) throw NumericalError("reference_descent: non-finite start value");

  Vector x_prev, grad_prev;
  double step = 1.0;
  DescentResult res;
  for (int it = 0; it < max_iter; ++it) {
    const double gnorm = grad.lpNorm<Eigen::Infinity>();
    res.iterations = it;
    if (gnorm <= tol) {
      res.converged = true;
      break;
    }
    if (x_prev.size() > 0) {
      const Vector s = x - x_prev;
      const Vector y = grad - grad_prev;
      const double sy = s.dot(y);
      if (sy > 0.0) step = s.squaredNorm() / sy;
    }
    step = std::clamp(step, 1e-16, 1e16);

    x_prev = x;
    grad_prev = grad;
    double trial_step = step;
    for (int bt = 0; bt < 80; ++bt) {
      Vector x_trial = x_prev - trial_step * grad_prev;
      Vector grad_trial(x.size());
      const double v = f(x_trial, grad_trial);
      if (std::isfinite(v) && v <= value) {
        x = std::move(x_trial);
        grad = std::move(grad_trial);
        value = v;
        break;
      }
      trial_step *= 0.5;
    }
    if ((x - x_prev).squaredNorm() == 0.0) break;  // stalled
  }
  res.x = std::move(x);
  res.value = value;
  res.grad_norm = grad.lpNorm<Eigen::Infinity>();
  return res;
}

DescentResult reference_descent_ball(const ValueGrad& f, Vector x0, double delta, double tol,
                                     int max_iter) {
  const auto project = [delta](Vector v) {
    const double half_sq = 0.5 * v.squaredNorm();
    if (half_sq > delta) v *= std::sqrt(2.0 * delta / (2.0 * half_sq));
    return v;
  };

  Vector x = project(std::move(x0));
  Vector grad(x.size());
  double value = f(x, grad);
  if (!std::isfinite(value)) {
    throw NumericalError("reference_descent_ball: non-finite start value");
  }

  Vector x_prev, grad_prev;
  double step = 1.0;
  DescentResult res;
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it;
    // projected-gradient stationarity measure at unit step
    const Vector probe = project(x - grad);
    const double stat = (x - probe).lpNorm<Eigen::Infinity>();
    if (stat <= tol) {
      res.converged = true;
      break;
    }
    if (x_prev.size() > 0) {
      const Vector s = x - x_prev;
      const Vector y = grad - grad_prev;
      const double sy = s.dot(y);
      if (sy > 0.0) step = s.squaredNorm() / sy;
    }
    step = std::clamp(step, 1e-16, 1e16);

    x_prev = x;
    grad_prev = grad;
    double trial_step = step;
    bool moved = false;
    for (int bt = 0; bt < 80; ++bt) {
      Vector x_trial = project(x_prev - trial_step * grad_prev);
      Vector grad_trial(x.size());
      const double v = f(x_trial, grad_trial);
      if (std::isfinite(v) && v <= value && (x_trial - x_prev).squaredNorm() > 0.0) {
        x = std::move(x_trial);
        grad = std::move(grad_trial);
        value = v;
        moved = true;
        break;
      }
      trial_step *= 0.5;
    }
    if (!moved) break;
  }
  res.x = std::move(x);
  res.value = value;
  res.grad_norm = grad.lpNorm<Eigen::Infinity>();
  return res;
}

}  // namespace dualgan
