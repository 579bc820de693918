#include "dualgan/data_features.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dualgan/errors.hpp"

namespace dualgan {

using json = nlohmann::json;

void RingMixtureSpec::validate() const {
  if (mode_count < 1) throw ValidationError("RingMixtureSpec: mode_count must be >= 1");
  if (!(radius > 0.0)) throw ValidationError("RingMixtureSpec: radius must be positive");
  if (!(covariance_scale > 0.0)) {
    throw ValidationError("RingMixtureSpec: covariance_scale must be positive");
  }
  if (dimension != 2) throw ValidationError("RingMixtureSpec: only 2-D mixtures supported");
}

RingMixtureSpec make_ring_mixture(int mode_count, double radius, double covariance_scale) {
  RingMixtureSpec spec{mode_count, radius, covariance_scale, 2};
  spec.validate();
  return spec;
}

Matrix mixture_centers(const RingMixtureSpec& spec) {
  spec.validate();
  Matrix centers(spec.mode_count, 2);
  for (int j = 0; j < spec.mode_count; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / spec.mode_count;
    centers(j, 0) = spec.radius * std::cos(angle);
    centers(j, 1) = spec.radius * std::sin(angle);
  }
  return centers;
}

Matrix sample_mixture(const RingMixtureSpec& spec, int n, Rng& rng) {
  spec.validate();
  if (n < 1) throw ValidationError("sample_mixture: n must be >= 1");
  const Matrix centers = mixture_centers(spec);
  const double sigma = std::sqrt(spec.covariance_scale);
  std::uniform_int_distribution<int> pick(0, spec.mode_count - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix X(n, 2);
  for (int i = 0; i < n; ++i) {
    const int j = pick(rng);
    X(i, 0) = centers(j, 0) + sigma * gauss(rng);
    X(i, 1) = centers(j, 1) + sigma * gauss(rng);
  }
  return X;
}

void NoiseSpec::validate() const {
  if (dimension < 1) throw ValidationError("NoiseSpec: dimension must be >= 1");
}

Matrix sample_noise(const NoiseSpec& spec, int n, Rng& rng) {
  spec.validate();
  if (n < 1) throw ValidationError("sample_noise: n must be >= 1");
  Matrix Z(n, spec.dimension);
  if (spec.distribution == NoiseSpec::Dist::Gaussian) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < spec.dimension; ++j) Z(i, j) = gauss(rng);
  } else {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < spec.dimension; ++j) Z(i, j) = uni(rng);
  }
  return Z;
}

namespace {

// log-sum-exp stabilized softmax of -|x - a_j|^2 / T, row-wise
Matrix rbf_softmax(const Matrix& X, const Matrix& anchors, double temperature) {
  const int n = static_cast<int>(X.rows());
  const int m = static_cast<int>(anchors.rows());
  Matrix scores(n, m);
  for (int j = 0; j < m; ++j) {
    scores.col(j) = -(X.rowwise() - anchors.row(j)).rowwise().squaredNorm() / temperature;
  }
  Matrix feats(n, m);
  for (int i = 0; i < n; ++i) {
    const double mx = scores.row(i).maxCoeff();
    Eigen::RowVectorXd e = (scores.row(i).array() - mx).exp();
    feats.row(i) = e / e.sum();
  }
  return feats;
}

}  // namespace

Vector rbf_features(const Vector& x, const Matrix& anchors, double temperature) {
  if (!(temperature > 0.0)) throw ValidationError("rbf_features: temperature must be positive");
  if (anchors.rows() < 1) throw ValidationError("rbf_features: need at least one anchor");
  if (x.size() != anchors.cols()) {
    throw ValidationError("rbf_features: input dimension does not match anchors");
  }
  return rbf_softmax(x.transpose(), anchors, temperature).row(0).transpose();
}

Matrix rbf_features_batch(const Matrix& X, const Matrix& anchors, double temperature) {
  if (!(temperature > 0.0)) throw ValidationError("rbf_features: temperature must be positive");
  if (anchors.rows() < 1) throw ValidationError("rbf_features: need at least one anchor");
  if (X.cols() != anchors.cols()) {
    throw ValidationError("rbf_features: input dimension does not match anchors");
  }
  return rbf_softmax(X, anchors, temperature);
}

FeatureMap FeatureMap::identity() {
  FeatureMap map;
  map.kind = Kind::Identity;
  return map;
}

FeatureMap FeatureMap::rbf(Matrix anchors, double temperature) {
  FeatureMap map;
  map.kind = Kind::Rbf;
  map.anchors = std::move(anchors);
  map.temperature = temperature;
  map.validate();
  return map;
}

FeatureMap FeatureMap::random_net(MLPSpec spec, ParamVector params, bool concat_layers) {
  FeatureMap map;
  map.kind = Kind::RandomNet;
  map.net_spec = std::move(spec);
  map.net_params = std::move(params);
  map.concat_layers = concat_layers;
  map.validate();
  return map;
}

void FeatureMap::validate() const {
  switch (kind) {
    case Kind::Identity:
      return;
    case Kind::Rbf:
      if (anchors.rows() < 1) throw ValidationError("FeatureMap: rbf needs anchors");
      if (!(temperature > 0.0)) throw ValidationError("FeatureMap: rbf temperature must be > 0");
      return;
    case Kind::RandomNet:
      net_spec.validate();
      if (net_params.size() != net_spec.param_count()) {
        throw ValidationError("FeatureMap: random_net params do not match spec");
      }
      return;
  }
}

int FeatureMap::output_dim(int input_dim) const {
  switch (kind) {
    case Kind::Identity:
      return input_dim;
    case Kind::Rbf:
      return static_cast<int>(anchors.rows());
    case Kind::RandomNet: {
      if (!concat_layers) return net_spec.output_dim();
      int total = 0;
      for (int l = 1; l + 1 < static_cast<int>(net_spec.layer_sizes.size()); ++l) {
        total += net_spec.layer_sizes[l];
      }
      return total;
    }
  }
  return 0;
}

FeatureForward feature_forward(const FeatureMap& map, const Matrix& X) {
  map.validate();
  FeatureTape tape;
  tape.kind = map.kind;
  switch (map.kind) {
    case FeatureMap::Kind::Identity:
      return {X, std::move(tape)};
    case FeatureMap::Kind::Rbf: {
      tape.inputs = X;
      tape.feats = rbf_features_batch(X, map.anchors, map.temperature);
      return {tape.feats, std::move(tape)};
    }
    case FeatureMap::Kind::RandomNet: {
      ForwardResult fwd = forward_mlp(map.net_spec, map.net_params, X);
      if (!map.concat_layers) {
        tape.net_tape = std::move(fwd.tape);
        return {fwd.outputs, std::move(tape)};
      }
      const int n = static_cast<int>(X.rows());
      const int layers = map.net_spec.affine_layer_count();
      Matrix feats(n, map.output_dim(static_cast<int>(X.cols())));
      int col = 0;
      for (int l = 0; l + 1 < layers; ++l) {  // hidden post-activations only
        const Matrix& a = fwd.tape.post[l];
        feats.block(0, col, n, a.cols()) = a;
        col += static_cast<int>(a.cols());
      }
      tape.net_tape = std::move(fwd.tape);
      return {feats, std::move(tape)};
    }
  }
  throw NumericalError("feature_forward: unknown kind");
}

Matrix feature_backward(const FeatureMap& map, const FeatureTape& tape,
                        const Matrix& feat_adjoints) {
  switch (map.kind) {
    case FeatureMap::Kind::Identity:
      return feat_adjoints;
    case FeatureMap::Kind::Rbf: {
      const Matrix& X = tape.inputs;
      const Matrix& phi = tape.feats;
      const int n = static_cast<int>(X.rows());
      Matrix dX = Matrix::Zero(n, X.cols());
      // softmax backward, then the score term d s_j / dx = -(2/T)(x - a_j)
      for (int i = 0; i < n; ++i) {
        const double inner = feat_adjoints.row(i).dot(phi.row(i));
        Eigen::RowVectorXd v = phi.row(i).cwiseProduct(feat_adjoints.row(i));
        v -= inner * phi.row(i);
        const double vsum = v.sum();
        dX.row(i) = (-2.0 / map.temperature) * (vsum * X.row(i) - v * map.anchors);
      }
      return dX;
    }
    case FeatureMap::Kind::RandomNet: {
      const int layers = map.net_spec.affine_layer_count();
      if (!map.concat_layers) {
        return grad_inputs(tape.net_tape, feat_adjoints);
      }
      std::vector<Matrix> adjoints(layers);
      int col = 0;
      const int n = static_cast<int>(feat_adjoints.rows());
      for (int l = 0; l + 1 < layers; ++l) {
        const int width = map.net_spec.layer_sizes[l + 1];
        adjoints[l] = feat_adjoints.block(0, col, n, width);
        col += width;
      }
      return backward_multi(tape.net_tape, adjoints).input_grad;
    }
  }
  throw NumericalError("feature_backward: unknown kind");
}

void save_dataset(const std::string& csv_path, const std::string& json_path, const Matrix& X,
                  const RingMixtureSpec& spec, unsigned long seed,
                  const std::string& config_hash) {
  std::ofstream csv(csv_path);
  if (!csv) throw ValidationError("cannot open dataset file for writing: " + csv_path);
  if (!config_hash.empty()) csv << "# config=" << config_hash << "\n";
  csv.precision(17);
  for (int i = 0; i < X.rows(); ++i) {
    for (int j = 0; j < X.cols(); ++j) {
      if (j) csv << ",";
      csv << X(i, j);
    }
    csv << "\n";
  }

  json j;
  j["kind"] = "ring_mixture";
  j["mode_count"] = spec.mode_count;
  j["radius"] = spec.radius;
  j["covariance_scale"] = spec.covariance_scale;
  j["dimension"] = spec.dimension;
  j["rows"] = X.rows();
  j["seed"] = seed;
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  std::ofstream out(json_path);
  if (!out) throw ValidationError("cannot open dataset spec for writing: " + json_path);
  out << j.dump(2) << "\n";
}

std::pair<Matrix, RingMixtureSpec> load_dataset(const std::string& csv_path,
                                                const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw ValidationError("cannot open dataset spec: " + json_path);
  json j;
  in >> j;
  RingMixtureSpec spec;
  spec.mode_count = j.at("mode_count").get<int>();
  spec.radius = j.at("radius").get<double>();
  spec.covariance_scale = j.at("covariance_scale").get<double>();
  spec.dimension = j.at("dimension").get<int>();
  spec.validate();

  std::ifstream csv(csv_path);
  if (!csv) throw ValidationError("cannot open dataset file: " + csv_path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("dataset file is empty: " + csv_path);
  Matrix X(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int i = 0; i < X.rows(); ++i) {
    if (static_cast<int>(rows[i].size()) != X.cols()) {
      throw ValidationError("dataset file has ragged rows: " + csv_path);
    }
    for (int jj = 0; jj < X.cols(); ++jj) X(i, jj) = rows[i][jj];
  }
  return {X, spec};
}

}  // namespace dualgan
