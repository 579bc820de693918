#include "dualgan/autodiff.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace dualgan {

namespace {

using json = nlohmann::json;

Matrix apply_activation(const Matrix& z, Activation a) {
  switch (a) {
    case Activation::Relu:
      return z.cwiseMax(0.0);
    case Activation::Tanh:
      return z.array().tanh().matrix();
  }
  throw NumericalError("unknown activation");
}

// dA/dZ elementwise, from pre- and post-activation values
Matrix activation_slope(const Matrix& z, const Matrix& a_post, Activation a) {
  switch (a) {
    case Activation::Relu:
      return (z.array() > 0.0).cast<double>().matrix();
    case Activation::Tanh:
      return (1.0 - a_post.array().square()).matrix();
  }
  throw NumericalError("unknown activation");
}

}  // namespace

int MLPSpec::param_count() const {
  int total = 0;
  for (int l = 0; l + 1 < static_cast<int>(layer_sizes.size()); ++l) {
    total += layer_sizes[l + 1] * layer_sizes[l] + layer_sizes[l + 1];
  }
  return total;
}

void MLPSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw ValidationError("MLPSpec: need at least input and output layer sizes");
  }
  for (size_t i = 0; i < layer_sizes.size(); ++i) {
    if (layer_sizes[i] <= 0) {
      throw ValidationError("MLPSpec: layer " + std::to_string(i) + " has non-positive size");
    }
  }
  if (static_cast<int>(activations.size()) != hidden_layer_count()) {
    throw ValidationError("MLPSpec: expected one activation per hidden layer (" +
                          std::to_string(hidden_layer_count()) + "), got " +
                          std::to_string(activations.size()));
  }
}

MLPSpec make_mlp_spec(std::vector<int> layer_sizes, Activation hidden_activation,
                      OutputKind output) {
  MLPSpec spec;
  spec.layer_sizes = std::move(layer_sizes);
  spec.output = output;
  const int hidden = static_cast<int>(spec.layer_sizes.size()) - 2;
  spec.activations.assign(std::max(hidden, 0), hidden_activation);
  spec.validate();
  return spec;
}

namespace {

std::vector<ParamBlock> make_layout(const MLPSpec& spec) {
  std::vector<ParamBlock> blocks;
  int offset = 0;
  for (int l = 0; l < spec.affine_layer_count(); ++l) {
    const int in = spec.layer_sizes[l];
    const int out = spec.layer_sizes[l + 1];
    blocks.push_back({out, in, offset});
    offset += out * in;
    blocks.push_back({out, 1, offset});
    offset += out;
  }
  return blocks;
}

}  // namespace

ParamVector zero_params(const MLPSpec& spec) {
  spec.validate();
  ParamVector p;
  p.blocks = make_layout(spec);
  p.values = Vector::Zero(spec.param_count());
  return p;
}

ParamVector random_params(const MLPSpec& spec, Rng& rng, double scale) {
  ParamVector p = zero_params(spec);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int l = 0; l < spec.affine_layer_count(); ++l) {
    const ParamBlock& w = p.blocks[2 * l];
    const double s = scale < 0.0 ? 1.0 / std::sqrt(static_cast<double>(w.cols)) : scale;
    for (int i = 0; i < w.rows * w.cols; ++i) {
      p.values[w.offset + i] = s * gauss(rng);
    }
    // biases stay zero
  }
  return p;
}

ParamVector params_from_values(const MLPSpec& spec, Vector values) {
  if (values.size() != spec.param_count()) {
    throw ValidationError("params_from_values: expected " + std::to_string(spec.param_count()) +
                          " values, got " + std::to_string(values.size()));
  }
  ParamVector p;
  p.blocks = make_layout(spec);
  p.values = std::move(values);
  return p;
}

Eigen::Map<const Matrix> weight_block(const ParamVector& p, int layer) {
  const ParamBlock& b = p.blocks.at(2 * layer);
  return {p.values.data() + b.offset, b.rows, b.cols};
}

Eigen::Map<const Vector> bias_block(const ParamVector& p, int layer) {
  const ParamBlock& b = p.blocks.at(2 * layer + 1);
  return {p.values.data() + b.offset, b.rows};
}

ForwardResult forward_mlp(const MLPSpec& spec, const ParamVector& params, const Matrix& inputs) {
  spec.validate();
  if (params.size() != spec.param_count()) {
    throw ValidationError("forward_mlp: parameter vector has " + std::to_string(params.size()) +
                          " entries, spec needs " + std::to_string(spec.param_count()));
  }
  if (inputs.cols() != spec.input_dim()) {
    throw ValidationError("forward_mlp: layer 0 expects " + std::to_string(spec.input_dim()) +
                          " input columns, got " + std::to_string(inputs.cols()));
  }
  if (!inputs.allFinite()) {
    throw NumericalError("forward_mlp: non-finite inputs");
  }

  Tape tape;
  tape.spec = spec;
  tape.params = params;
  tape.inputs = inputs;

  Matrix a = inputs;
  const int layers = spec.affine_layer_count();
  for (int l = 0; l < layers; ++l) {
    const auto w = weight_block(params, l);
    const auto b = bias_block(params, l);
    Matrix z = a * w.transpose();
    z.rowwise() += b.transpose();
    if (l + 1 < layers) {
      a = apply_activation(z, spec.activations[l]);
    } else if (spec.output == OutputKind::Sigmoid) {
      a = z.unaryExpr([](double t) { return sigmoid(t); });
    } else {
      a = z;
    }
    tape.pre.push_back(std::move(z));
    tape.post.push_back(a);
  }

  return {tape.post.back(), std::move(tape)};
}

BackwardResult backward_multi(const Tape& tape, const std::vector<Matrix>& post_adjoints) {
  const MLPSpec& spec = tape.spec;
  const int layers = spec.affine_layer_count();
  if (static_cast<int>(post_adjoints.size()) != layers) {
    throw ValidationError("backward_multi: need one adjoint slot per layer");
  }
  for (int l = 0; l < layers; ++l) {
    const Matrix& adj = post_adjoints[l];
    if (adj.size() != 0 &&
        (adj.rows() != tape.post[l].rows() || adj.cols() != tape.post[l].cols())) {
      throw ValidationError("backward_multi: adjoint shape mismatch at layer " +
                            std::to_string(l));
    }
  }

  ParamVector grad = zero_params(spec);
  Matrix d_post;  // adjoint w.r.t. post-activation of the current layer

  for (int l = layers - 1; l >= 0; --l) {
    if (post_adjoints[l].size() != 0) {
      if (d_post.size() == 0) {
        d_post = post_adjoints[l];
      } else {
        d_post += post_adjoints[l];
      }
    }
    if (d_post.size() == 0) {
      d_post = Matrix::Zero(tape.post[l].rows(), tape.post[l].cols());
    }

    Matrix d_pre;
    if (l + 1 < layers) {
      d_pre = d_post.cwiseProduct(activation_slope(tape.pre[l], tape.post[l],
                                                   spec.activations[l]));
    } else if (spec.output == OutputKind::Sigmoid) {
      d_pre = d_post.cwiseProduct(
          (tape.post[l].array() * (1.0 - tape.post[l].array())).matrix());
    } else {
      d_pre = d_post;
    }

    const Matrix& a_prev = (l == 0) ? tape.inputs : tape.post[l - 1];
    const ParamBlock& wb = grad.blocks[2 * l];
    const ParamBlock& bb = grad.blocks[2 * l + 1];
    Eigen::Map<Matrix>(grad.values.data() + wb.offset, wb.rows, wb.cols) =
        d_pre.transpose() * a_prev;
    Eigen::Map<Vector>(grad.values.data() + bb.offset, bb.rows) = d_pre.colwise().sum();

    d_post = d_pre * weight_block(tape.params, l);
  }

  return {std::move(grad), std::move(d_post)};
}

BackwardResult backward(const Tape& tape, const Matrix& output_adjoints) {
  const int layers = tape.spec.affine_layer_count();
  if (output_adjoints.rows() != tape.post.back().rows() ||
      output_adjoints.cols() != tape.post.back().cols()) {
    throw ValidationError("backward: adjoint shape mismatch, expected " +
                          std::to_string(tape.post.back().rows()) + "x" +
                          std::to_string(tape.post.back().cols()));
  }
  std::vector<Matrix> adjoints(layers);
  adjoints.back() = output_adjoints;
  return backward_multi(tape, adjoints);
}

ParamVector grad_params(const Tape& tape, const Matrix& output_adjoints) {
  return backward(tape, output_adjoints).param_grad;
}

Matrix grad_inputs(const Tape& tape, const Matrix& output_adjoints) {
  return backward(tape, output_adjoints).input_grad;
}

Matrix per_sample_score_grads(const MLPSpec& spec, const ParamVector& params,
                              const Matrix& inputs) {
  spec.validate();
  if (spec.output_dim() != 1) {
    throw ValidationError("per_sample_score_grads: spec output dimension must be 1, got " +
                          std::to_string(spec.output_dim()));
  }
  ForwardResult fwd = forward_mlp(spec, params, inputs);
  const Tape& tape = fwd.tape;
  const int n = tape.sample_count();
  const int layers = spec.affine_layer_count();

  Matrix out = Matrix::Zero(n, spec.param_count());

  // Per-sample adjoint of the scalar output, propagated layer by layer.
  Matrix d_post = Matrix::Ones(n, 1);
  for (int l = layers - 1; l >= 0; --l) {
    Matrix d_pre;
    if (l + 1 < layers) {
      d_pre = d_post.cwiseProduct(activation_slope(tape.pre[l], tape.post[l],
                                                   spec.activations[l]));
    } else if (spec.output == OutputKind::Sigmoid) {
      d_pre = d_post.cwiseProduct(
          (tape.post[l].array() * (1.0 - tape.post[l].array())).matrix());
    } else {
      d_pre = d_post;
    }

    const Matrix& a_prev = (l == 0) ? tape.inputs : tape.post[l - 1];
    const ParamBlock& wb = tape.params.blocks[2 * l];
    const ParamBlock& bb = tape.params.blocks[2 * l + 1];
    // Weight gradient of sample i is the outer product d_pre.row(i)^T a_prev.row(i);
    // column-major layout means entry (r, c) lands at offset + c*rows + r.
    for (int c = 0; c < wb.cols; ++c) {
      out.block(0, wb.offset + c * wb.rows, n, wb.rows) =
          d_pre.array().colwise() * a_prev.col(c).array();
    }
    out.block(0, bb.offset, n, bb.rows) = d_pre;

    d_post = d_pre * weight_block(tape.params, l);
  }

  return out;
}

double finite_diff_check(const std::function<double(const Vector&)>& f,
                         const Vector& analytic_grad, const Vector& point, double eps) {
  if (!(eps > 0.0)) {
    throw ValidationError("finite_diff_check: eps must be positive");
  }
  if (analytic_grad.size() != point.size()) {
    throw ValidationError("finite_diff_check: gradient/point size mismatch");
  }
  double worst = 0.0;
  Vector p = point;
  for (int i = 0; i < point.size(); ++i) {
    p[i] = point[i] + eps;
    const double fp = f(p);
    p[i] = point[i] - eps;
    const double fm = f(p);
    p[i] = point[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericalError("finite_diff_check: non-finite value at perturbed coordinate " +
                           std::to_string(i));
    }
    const double fd = (fp - fm) / (2.0 * eps);
    const double err = std::abs(analytic_grad[i] - fd) / (1.0 + std::abs(analytic_grad[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

std::string to_string(Activation a) {
  return a == Activation::Relu ? "relu" : "tanh";
}

std::string to_string(OutputKind k) {
  return k == OutputKind::Linear ? "linear" : "sigmoid";
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  throw ValidationError("unknown activation '" + s + "' (expected relu or tanh)");
}

OutputKind output_kind_from_string(const std::string& s) {
  if (s == "linear") return OutputKind::Linear;
  if (s == "sigmoid") return OutputKind::Sigmoid;
  throw ValidationError("unknown output kind '" + s + "' (expected linear or sigmoid)");
}

void save_checkpoint(const std::string& path, const MLPSpec& spec, const ParamVector& params,
                     const std::string& config_hash) {
  spec.validate();
  json j;
  j["format"] = "dualgan-checkpoint";
  j["version"] = 1;
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  j["layer_sizes"] = spec.layer_sizes;
  std::vector<std::string> acts;
  for (Activation a : spec.activations) acts.push_back(to_string(a));
  j["activations"] = acts;
  j["output"] = to_string(spec.output);
  j["values"] = std::vector<double>(params.values.data(), params.values.data() + params.size());

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open checkpoint file for writing: " + path);
  out << j.dump(2) << "\n";
}

std::pair<MLPSpec, ParamVector> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open checkpoint file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("checkpoint parse error in " + path + ": " + e.what());
  }
  if (j.value("format", "") != "dualgan-checkpoint" || j.value("version", 0) != 1) {
    throw ValidationError("unsupported checkpoint format in " + path);
  }
  MLPSpec spec;
  spec.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  for (const auto& s : j.at("activations")) {
    spec.activations.push_back(activation_from_string(s.get<std::string>()));
  }
  spec.output = output_kind_from_string(j.at("output").get<std::string>());
  spec.validate();

  const auto values = j.at("values").get<std::vector<double>>();
  ParamVector params = params_from_values(
      spec, Eigen::Map<const Vector>(values.data(), static_cast<int>(values.size())));
  return {spec, params};
}

}  // namespace dualgan
