#include "dualgan/trust_region.hpp"

#include <cmath>

#include "dualgan/dual_linear.hpp"
#include "dualgan/errors.hpp"

namespace dualgan {

void TrustRegionState::validate() const {
  if (!(delta > 0.0)) throw ValidationError("TrustRegionState: delta must be positive");
  if (!(rho_accept_low > 0.0 && rho_accept_low < 1.0 && rho_accept_high > 1.0)) {
    throw ValidationError("TrustRegionState: need 0 < rho_low < 1 < rho_high");
  }
  if (!(shrink > 0.0 && shrink < 1.0)) throw ValidationError("TrustRegionState: shrink in (0,1)");
  if (!(expand > 1.0)) throw ValidationError("TrustRegionState: expand must exceed 1");
  if (max_resolves < 0) throw ValidationError("TrustRegionState: max_resolves must be >= 0");
}

void ScoreLinData::validate() const {
  const int n = sample_count();
  if (n < 1) throw ValidationError("ScoreLinData: need at least one example");
  if (scores_z.size() != n) throw ValidationError("ScoreLinData: score vectors differ in length");
  if (grads_x.rows() != n || grads_z.rows() != n) {
    throw ValidationError("ScoreLinData: gradient row count mismatch");
  }
  if (grads_x.cols() != w_k.size() || grads_z.cols() != w_k.size()) {
    throw ValidationError("ScoreLinData: gradient column count must equal parameter count");
  }
  if (!(C > 0.0)) throw ValidationError("ScoreLinData: C must be positive");
}

Vector step_cost_lin(const Vector& grad_f, double delta) {
  if (!(delta > 0.0)) throw ValidationError("step_cost_lin: delta must be positive");
  const double norm = grad_f.norm();
  if (norm == 0.0) return Vector::Zero(grad_f.size());
  return (-std::sqrt(2.0 * delta) / norm) * grad_f;
}

double model_cost_lin(const Vector& s, double f_k, const Vector& grad_f) {
  if (s.size() != grad_f.size()) throw ValidationError("model_cost_lin: shape mismatch");
  return f_k + grad_f.dot(s);
}

double model_score_lin(const Vector& s, const ScoreLinData& data) {
  data.validate();
  if (s.size() != data.param_count()) throw ValidationError("model_score_lin: shape mismatch");
  const int n = data.sample_count();
  const Vector sx = data.scores_x + data.grads_x * s;
  const Vector sz = data.scores_z + data.grads_z * s;
  double value = 0.5 * data.C * (data.w_k + s).squaredNorm();
  for (int i = 0; i < n; ++i) {
    value += (softplus(-sx[i]) + softplus(sz[i])) / (2.0 * n);
  }
  return value;
}

namespace {

// residual inside the squared norm of the dual: sum lambda_x dFx - sum lambda_z dFz - C w_k
Vector dual_residual(const TRDualVars& lambda, const ScoreLinData& data) {
  return data.grads_x.transpose() * lambda.lambda_x -
         data.grads_z.transpose() * lambda.lambda_z - data.C * data.w_k;
}

double entropy_slope(double u) {
  if (u <= 0.0) return std::numeric_limits<double>::infinity();
  if (u >= 1.0) return -std::numeric_limits<double>::infinity();
  return std::log((1.0 - u) / u);
}

}  // namespace

TRDualEval tr_dual_objective(const TRDualVars& lambda, const ScoreLinData& data, double delta) {
  data.validate();
  const int n = data.sample_count();
  if (lambda.lambda_x.size() != n || lambda.lambda_z.size() != n) {
    throw ValidationError("tr_dual_objective: dual variable size mismatch");
  }
  if (lambda.lambda_T < 0.0) throw ValidationError("tr_dual_objective: lambda_T must be >= 0");

  const double a = data.C + lambda.lambda_T;
  const Vector r = dual_residual(lambda, data);

  TRDualEval eval;
  eval.value = 0.5 * data.C * data.w_k.squaredNorm() - r.squaredNorm() / (2.0 * a) -
               lambda.lambda_x.dot(data.scores_x) + lambda.lambda_z.dot(data.scores_z) -
               lambda.lambda_T * delta;
  for (int i = 0; i < n; ++i) {
    eval.value += (binary_entropy(2.0 * n * lambda.lambda_x[i]) +
                   binary_entropy(2.0 * n * lambda.lambda_z[i])) /
                  (2.0 * n);
  }

  const Vector rx = data.grads_x * r;
  const Vector rz = data.grads_z * r;
  eval.grad_x.resize(n);
  eval.grad_z.resize(n);
  for (int i = 0; i < n; ++i) {
    eval.grad_x[i] = -rx[i] / a - data.scores_x[i] +
                     entropy_slope(2.0 * n * lambda.lambda_x[i]);
    eval.grad_z[i] = rz[i] / a + data.scores_z[i] +
                     entropy_slope(2.0 * n * lambda.lambda_z[i]);
  }
  eval.grad_T = r.squaredNorm() / (2.0 * a * a) - delta;
  return eval;
}

Vector recover_step(const TRDualVars& lambda, const ScoreLinData& data) {
  return dual_residual(lambda, data) / (data.C + lambda.lambda_T);
}

namespace {

struct InnerSolve {
  TRDualVars lambda;
  double value = 0.0;
  SolveReport report;
};

// maximize over (lambda_x, lambda_z) with lambda_T held fixed
InnerSolve solve_inner(const ScoreLinData& data, double delta, double lambda_T,
                       const Vector& warm, double tol, int max_iter) {
  const int n = data.sample_count();
  const double box = 1.0 / (2.0 * n);
  const double a = data.C + lambda_T;

  Vector row_sq(2 * n);
  for (int i = 0; i < n; ++i) {
    row_sq[i] = data.grads_x.row(i).squaredNorm();
    row_sq[n + i] = data.grads_z.row(i).squaredNorm();
  }

  BoxReparamProblem problem;
  problem.dimension = 2 * n;
  problem.box_hi = box;
  problem.objective = [&, lambda_T](const Vector& stacked, Vector& grad) {
    TRDualVars lam{stacked.head(n), stacked.tail(n), lambda_T};
    const TRDualEval eval = tr_dual_objective(lam, data, delta);
    grad.head(n) = eval.grad_x;
    grad.tail(n) = eval.grad_z;
    return eval.value;
  };
  problem.curvature_diag = [&, a, n](const Vector& stacked, Vector& curv) {
    curv.resize(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
      const double u = std::clamp(2.0 * n * stacked[i], 1e-15, 1.0 - 1e-15);
      curv[i] = row_sq[i] / a + 2.0 * n / (u * (1.0 - u));
    }
  };

  SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.precondition = true;

  BoxSolveResult res = solve_box_concave(problem, warm, opts);
  InnerSolve out;
  out.lambda = {res.lambda.head(n), res.lambda.tail(n), lambda_T};
  out.value = res.report.objective_value;
  out.report = res.report;
  return out;
}

}  // namespace

TRDualSolution solve_tr_dual(const ScoreLinData& data, double delta, double tol, int max_iter) {
  data.validate();
  if (!(delta > 0.0)) throw ValidationError("solve_tr_dual: delta must be positive");
  const int n = data.sample_count();

  Vector warm = Vector::Constant(2 * n, 1.0 / (4.0 * n));
  int total_iters = 0;
  bool all_converged = true;
  InnerSolve last;

  // value and derivative of the dual restricted to lambda_T, with the box
  // variables maximized out (Danskin: derivative = 0.5|s|^2 - delta)
  auto restricted = [&](double lambda_T) {
    last = solve_inner(data, delta, lambda_T, warm, tol, max_iter);
    warm.head(n) = last.lambda.lambda_x;
    warm.tail(n) = last.lambda.lambda_z;
    total_iters += last.report.iterations;
    all_converged = all_converged && last.report.converged;
    const double half_sq = 0.5 * recover_step(last.lambda, data).squaredNorm();
    return std::make_pair(last.value, half_sq - delta);
  };

  const double lambda_T = solve_lambda_T(restricted);
  if (last.lambda.lambda_T != lambda_T) {
    restricted(lambda_T);  // re-solve the box variables at the final multiplier
  }

  TRDualSolution sol;
  sol.lambda = last.lambda;
  sol.step = recover_step(sol.lambda, data);
  sol.model_value = model_score_lin(sol.step, data);
  sol.dual_value = last.value;
  sol.report = last.report;
  sol.report.iterations = total_iters;
  sol.report.converged = all_converged && last.report.converged;
  sol.report.objective_value = last.value;
  return sol;
}

double acceptance_ratio(double f_old, double f_new, double model_at_step) {
  const double predicted = f_old - model_at_step;
  if (!(std::abs(predicted) > 1e-14)) {
    throw DegenerateModel("acceptance_ratio: predicted decrease is numerically zero");
  }
  return (f_old - f_new) / predicted;
}

DeltaUpdate update_delta(const TrustRegionState& state, double rho, bool constraint_active) {
  state.validate();
  if (!std::isfinite(rho)) throw ValidationError("update_delta: rho must be finite");
  if (rho >= state.rho_accept_low && rho <= state.rho_accept_high) {
    return {constraint_active ? state.delta * state.expand : state.delta, true};
  }
  return {state.delta * state.shrink, false};
}

}  // namespace dualgan
