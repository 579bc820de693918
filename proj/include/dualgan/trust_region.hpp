#pragma once

#include "dualgan/opt_core.hpp"
#include "dualgan/types.hpp"

namespace dualgan {

/// Current discriminator iterate, radius, and the adaptation policy knobs.
struct TrustRegionState {
  Vector w_k;
  double delta = 0.1;
  double rho_accept_low = 0.25;
  double rho_accept_high = 2.0;
  double shrink = 0.5;
  double expand = 2.0;
  int max_resolves = 10;

  void validate() const;
};

/// Box-constrained per-example duals plus the multiplier of the ball constraint.
struct TRDualVars {
  Vector lambda_x;
  Vector lambda_z;
  double lambda_T = 0.0;
};

/// Scores and per-example score gradients at the expansion point w_k.
struct ScoreLinData {
  Vector scores_x;  // F(w_k, x_i)
  Vector scores_z;  // F(w_k, G_theta(z_i))
  Matrix grads_x;   // n x P, row i = dF(w_k, x_i)/dw
  Matrix grads_z;   // n x P
  Vector w_k;
  double C = 1e-4;

  int sample_count() const { return static_cast<int>(scores_x.size()); }
  int param_count() const { return static_cast<int>(w_k.size()); }
  void validate() const;
};

/// Minimizer of the linearized objective over the ball 0.5|s|^2 <= delta:
/// a step of length sqrt(2 delta) along the negative gradient.
Vector step_cost_lin(const Vector& grad_f, double delta);

/// First-order model m(s) = f_k + grad_f . s.
double model_cost_lin(const Vector& s, double f_k, const Vector& grad_f);

/// Model with the score function linearized but the logistic losses kept:
/// m(0) equals the regularized objective at w_k and m is convex in s.
double model_score_lin(const Vector& s, const ScoreLinData& data);

struct TRDualEval {
  double value = 0.0;
  Vector grad_x;
  Vector grad_z;
  double grad_T = 0.0;
};

TRDualEval tr_dual_objective(const TRDualVars& lambda, const ScoreLinData& data, double delta);

/// s = (sum_i lambda_x_i dF_x_i - sum_i lambda_z_i dF_z_i - C w_k) / (C + lambda_T)
Vector recover_step(const TRDualVars& lambda, const ScoreLinData& data);

struct TRDualSolution {
  TRDualVars lambda;
  Vector step;
  double model_value = 0.0;  // m(s*), primal model at the recovered step
  double dual_value = 0.0;
  SolveReport report;
};

TRDualSolution solve_tr_dual(const ScoreLinData& data, double delta, double tol = 1e-8,
                             int max_iter = 5000);

/// rho = (f_old - f_new) / (f_old - model_at_step); throws DegenerateModel
/// when the predicted decrease is numerically zero.
double acceptance_ratio(double f_old, double f_new, double model_at_step);

struct DeltaUpdate {
  double delta = 0.0;
  bool accept = false;
};

/// Accept when rho lies in [low, high]; expansion only when the ball
/// constraint was active for the proposed step.
DeltaUpdate update_delta(const TrustRegionState& state, double rho, bool constraint_active);

}  // namespace dualgan
