#pragma once

#include <memory>

#include "dualgan/autodiff.hpp"
#include "dualgan/data_features.hpp"
#include "dualgan/opt_core.hpp"
#include "dualgan/types.hpp"

namespace dualgan {

/// Ties generated feature rows back to the generator parameters:
/// z -> G_theta(z) -> phi(G_theta(z)).
struct GeneratorLink {
  Tape gen_tape;
  FeatureMap features;
  FeatureTape feat_tape;
};

/// One batch of the linear-discriminator problem: n feature rows per side
/// and the L2 regularization weight C.
struct LinearBatch {
  Matrix data_feats;  // n x d
  Matrix gen_feats;   // n x d
  double C = 1e-4;
  std::shared_ptr<const GeneratorLink> link;  // absent for synthetic instances

  int sample_count() const { return static_cast<int>(data_feats.rows()); }
  int feature_dim() const { return static_cast<int>(data_feats.cols()); }
  void validate() const;
};

LinearBatch make_linear_batch(Matrix data_feats, Matrix gen_feats, double C);
/// Builds the batch through the generator and feature map, keeping the tapes.
LinearBatch make_linear_batch(const Matrix& data_x, const MLPSpec& gen_spec,
                              const ParamVector& theta, const Matrix& noise,
                              const FeatureMap& features, double C);

/// Per-example dual weights, each in [0, 1/(2n)].
struct LinearDualVars {
  Vector lambda_x;
  Vector lambda_z;
};

/// H(u) = -u log u - (1-u) log(1-u), natural log, H(0) = H(1) = 0.
double binary_entropy(double u);

double primal_objective_linear(const Vector& w, const LinearBatch& batch);
Vector primal_gradient_linear(const Vector& w, const LinearBatch& batch);

struct LinearDualEval {
  double value = 0.0;
  Vector grad_x;
  Vector grad_z;
};

LinearDualEval dual_objective_linear(const LinearDualVars& lambda, const LinearBatch& batch);

struct LinearDualSolution {
  LinearDualVars lambda;
  double value = 0.0;
  SolveReport report;
};

LinearDualSolution solve_dual_linear(const LinearBatch& batch, double tol = 1e-8,
                                     int max_iter = 5000);

/// w* = (1/C)(sum_i lambda_x_i x_i - sum_i lambda_z_i g_i)
Vector recover_weights(const LinearDualVars& lambda, const LinearBatch& batch);

/// Gradient of the dual value w.r.t. generator parameters with the dual
/// variables held fixed (envelope treatment); requires the generator link.
ParamVector generator_gradient_from_dual(const LinearDualVars& lambda, const LinearBatch& batch);

}  // namespace dualgan
