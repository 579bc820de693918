#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dualgan/errors.hpp"
#include "dualgan/types.hpp"

namespace dualgan {

enum class Activation { Relu, Tanh };
enum class OutputKind { Linear, Sigmoid };

/// Shape of a fully-connected network: layer_sizes = [d_in, h_1, ..., d_out],
/// one activation per hidden layer, affine output optionally through a sigmoid.
struct MLPSpec {
  std::vector<int> layer_sizes;
  std::vector<Activation> activations;
  OutputKind output = OutputKind::Linear;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int affine_layer_count() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int hidden_layer_count() const { return affine_layer_count() - 1; }
  int param_count() const;
  void validate() const;
};

MLPSpec make_mlp_spec(std::vector<int> layer_sizes, Activation hidden_activation,
                      OutputKind output = OutputKind::Linear);

struct ParamBlock {
  int rows = 0;
  int cols = 0;
  int offset = 0;
};

/// All weights and biases of one network as a flat vector plus the
/// (shape, offset) layout: weight then bias for each affine layer.
struct ParamVector {
  Vector values;
  std::vector<ParamBlock> blocks;

  int size() const { return static_cast<int>(values.size()); }
};

ParamVector zero_params(const MLPSpec& spec);
// scale < 0 picks 1/sqrt(fan_in) per layer
ParamVector random_params(const MLPSpec& spec, Rng& rng, double scale = -1.0);
ParamVector params_from_values(const MLPSpec& spec, Vector values);

Eigen::Map<const Matrix> weight_block(const ParamVector& p, int layer);
Eigen::Map<const Vector> bias_block(const ParamVector& p, int layer);

/// Record of one forward pass, replayed once in reverse for adjoints.
struct Tape {
  MLPSpec spec;
  ParamVector params;
  Matrix inputs;             // n x d_in
  std::vector<Matrix> pre;   // pre-activation Z_l per affine layer
  std::vector<Matrix> post;  // post-activation A_l (network output last)

  int sample_count() const { return static_cast<int>(inputs.rows()); }
};

struct ForwardResult {
  Matrix outputs;
  Tape tape;
};

ForwardResult forward_mlp(const MLPSpec& spec, const ParamVector& params, const Matrix& inputs);

struct BackwardResult {
  ParamVector param_grad;
  Matrix input_grad;
};

/// Gradient of sum_ij adjoint_ij * output_ij with respect to params and inputs.
BackwardResult backward(const Tape& tape, const Matrix& output_adjoints);
ParamVector grad_params(const Tape& tape, const Matrix& output_adjoints);
Matrix grad_inputs(const Tape& tape, const Matrix& output_adjoints);

/// Backward pass with adjoints injected at every post-activation layer
/// (index l matches tape.post[l]; empty matrices contribute nothing).
BackwardResult backward_multi(const Tape& tape, const std::vector<Matrix>& post_adjoints);

/// Row i = gradient of the scalar score F(params, inputs.row(i)) w.r.t. params.
Matrix per_sample_score_grads(const MLPSpec& spec, const ParamVector& params,
                              const Matrix& inputs);

/// Max over coordinates of |analytic - central difference| / (1 + |analytic|).
double finite_diff_check(const std::function<double(const Vector&)>& f,
                         const Vector& analytic_grad, const Vector& point, double eps);

// Versioned JSON checkpoint of (spec, flat values).
void save_checkpoint(const std::string& path, const MLPSpec& spec, const ParamVector& params,
                     const std::string& config_hash = {});
std::pair<MLPSpec, ParamVector> load_checkpoint(const std::string& path);

std::string to_string(Activation a);
std::string to_string(OutputKind k);
Activation activation_from_string(const std::string& s);
OutputKind output_kind_from_string(const std::string& s);

}  // namespace dualgan
