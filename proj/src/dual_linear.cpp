#include "dualgan/dual_linear.hpp"

#include <cmath>

#include "dualgan/errors.hpp"

namespace dualgan {

void LinearBatch::validate() const {
  if (data_feats.rows() < 1) throw ValidationError("LinearBatch: need at least one example");
  if (data_feats.rows() != gen_feats.rows()) {
    throw ValidationError("LinearBatch: data and generated sides must have equal row counts");
  }
  if (data_feats.cols() != gen_feats.cols()) {
    throw ValidationError("LinearBatch: feature dimensions differ between sides");
  }
  if (!(C > 0.0)) throw ValidationError("LinearBatch: C must be positive");
}

LinearBatch make_linear_batch(Matrix data_feats, Matrix gen_feats, double C) {
  LinearBatch batch;
  batch.data_feats = std::move(data_feats);
  batch.gen_feats = std::move(gen_feats);
  batch.C = C;
  batch.validate();
  return batch;
}

LinearBatch make_linear_batch(const Matrix& data_x, const MLPSpec& gen_spec,
                              const ParamVector& theta, const Matrix& noise,
                              const FeatureMap& features, double C) {
  ForwardResult gen = forward_mlp(gen_spec, theta, noise);
  auto link = std::make_shared<GeneratorLink>();
  link->gen_tape = std::move(gen.tape);
  link->features = features;

  FeatureForward gen_feats = feature_forward(features, gen.outputs);
  link->feat_tape = std::move(gen_feats.tape);

  FeatureForward data_feats = feature_forward(features, data_x);

  LinearBatch batch;
  batch.data_feats = std::move(data_feats.feats);
  batch.gen_feats = std::move(gen_feats.feats);
  batch.C = C;
  batch.link = std::move(link);
  batch.validate();
  return batch;
}

double binary_entropy(double u) {
  if (u < 0.0 || u > 1.0) {
    throw ValidationError("binary_entropy: argument must lie in [0, 1]");
  }
  double h = 0.0;
  if (u > 0.0) h -= u * std::log(u);
  if (u < 1.0) h -= (1.0 - u) * std::log(1.0 - u);
  return h;
}

double primal_objective_linear(const Vector& w, const LinearBatch& batch) {
  batch.validate();
  if (w.size() != batch.feature_dim()) {
    throw ValidationError("primal_objective_linear: weight dimension mismatch");
  }
  const int n = batch.sample_count();
  const Vector sx = batch.data_feats * w;
  const Vector sz = batch.gen_feats * w;
  double value = 0.5 * batch.C * w.squaredNorm();
  for (int i = 0; i < n; ++i) {
    value += (softplus(-sx[i]) + softplus(sz[i])) / (2.0 * n);
  }
  return value;
}

Vector primal_gradient_linear(const Vector& w, const LinearBatch& batch) {
  const int n = batch.sample_count();
  const Vector sx = batch.data_feats * w;
  const Vector sz = batch.gen_feats * w;
  Vector grad = batch.C * w;
  for (int i = 0; i < n; ++i) {
    grad -= sigmoid(-sx[i]) / (2.0 * n) * batch.data_feats.row(i).transpose();
    grad += sigmoid(sz[i]) / (2.0 * n) * batch.gen_feats.row(i).transpose();
  }
  return grad;
}

namespace {

Vector moment_difference(const LinearDualVars& lambda, const LinearBatch& batch) {
  return batch.data_feats.transpose() * lambda.lambda_x -
         batch.gen_feats.transpose() * lambda.lambda_z;
}

// d/du of (1/2n) H(2n u') evaluated per dual variable: log((1-u)/u) with
// u = 2n lambda; +-inf at the box boundary is the documented sentinel.
double entropy_slope(double u) {
  if (u <= 0.0) return std::numeric_limits<double>::infinity();
  if (u >= 1.0) return -std::numeric_limits<double>::infinity();
  return std::log((1.0 - u) / u);
}

}  // namespace

LinearDualEval dual_objective_linear(const LinearDualVars& lambda, const LinearBatch& batch) {
  batch.validate();
  const int n = batch.sample_count();
  if (lambda.lambda_x.size() != n || lambda.lambda_z.size() != n) {
    throw ValidationError("dual_objective_linear: dual variable size mismatch");
  }

  const Vector d = moment_difference(lambda, batch);
  LinearDualEval eval;
  eval.value = -d.squaredNorm() / (2.0 * batch.C);
  for (int i = 0; i < n; ++i) {
    eval.value += (binary_entropy(2.0 * n * lambda.lambda_x[i]) +
                   binary_entropy(2.0 * n * lambda.lambda_z[i])) /
                  (2.0 * n);
  }

  const Vector dx_inner = batch.data_feats * d;
  const Vector dz_inner = batch.gen_feats * d;
  eval.grad_x.resize(n);
  eval.grad_z.resize(n);
  for (int i = 0; i < n; ++i) {
    eval.grad_x[i] = -dx_inner[i] / batch.C + entropy_slope(2.0 * n * lambda.lambda_x[i]);
    eval.grad_z[i] = dz_inner[i] / batch.C + entropy_slope(2.0 * n * lambda.lambda_z[i]);
  }
  return eval;
}

LinearDualSolution solve_dual_linear(const LinearBatch& batch, double tol, int max_iter) {
  batch.validate();
  const int n = batch.sample_count();
  const double box = 1.0 / (2.0 * n);

  Vector row_sq(2 * n);
  for (int i = 0; i < n; ++i) {
    row_sq[i] = batch.data_feats.row(i).squaredNorm();
    row_sq[n + i] = batch.gen_feats.row(i).squaredNorm();
  }

  BoxReparamProblem problem;
  problem.dimension = 2 * n;
  problem.box_hi = box;
  problem.objective = [&](const Vector& stacked, Vector& grad) {
    LinearDualVars lam{stacked.head(n), stacked.tail(n)};
    const LinearDualEval eval = dual_objective_linear(lam, batch);
    grad.head(n) = eval.grad_x;
    grad.tail(n) = eval.grad_z;
    return eval.value;
  };
  problem.curvature_diag = [&, n](const Vector& stacked, Vector& curv) {
    curv.resize(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
      const double u = std::clamp(2.0 * n * stacked[i], 1e-15, 1.0 - 1e-15);
      curv[i] = row_sq[i] / batch.C + 2.0 * n / (u * (1.0 - u));
    }
  };

  SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.precondition = true;

  Vector init = Vector::Constant(2 * n, 1.0 / (4.0 * n));
  BoxSolveResult res = solve_box_concave(problem, init, opts);

  // tighten until the recovered weights are stationary for the primal
  for (int retry = 0; retry < 3; ++retry) {
    LinearDualVars lam{res.lambda.head(n), res.lambda.tail(n)};
    const Vector w = recover_weights(lam, batch);
    if (primal_gradient_linear(w, batch).lpNorm<Eigen::Infinity>() <= 5.0 * tol) break;
    opts.tol *= 0.1;
    BoxSolveResult refined = solve_box_concave(problem, res.lambda, opts);
    refined.report.iterations += res.report.iterations;
    res = std::move(refined);
  }

  LinearDualSolution sol;
  sol.lambda = {res.lambda.head(n), res.lambda.tail(n)};
  sol.value = res.report.objective_value;
  sol.report = res.report;
  return sol;
}

Vector recover_weights(const LinearDualVars& lambda, const LinearBatch& batch) {
  batch.validate();
  return moment_difference(lambda, batch) / batch.C;
}

ParamVector generator_gradient_from_dual(const LinearDualVars& lambda,
                                         const LinearBatch& batch) {
  batch.validate();
  if (!batch.link) {
    throw ValidationError(
        "generator_gradient_from_dual: batch has no generator tape (synthetic batch)");
  }
  const Vector d = moment_difference(lambda, batch);
  // dg/d(gen_feats_i) = (lambda_z_i / C) * d
  const Matrix feat_adjoints = (lambda.lambda_z / batch.C) * d.transpose();
  const Matrix gen_out_adjoints =
      feature_backward(batch.link->features, batch.link->feat_tape, feat_adjoints);
  return grad_params(batch.link->gen_tape, gen_out_adjoints);
}

}  // namespace dualgan
