#pragma once

#include <string>
#include <utility>

#include "dualgan/autodiff.hpp"
#include "dualgan/types.hpp"

namespace dualgan {

/// Ring of isotropic Gaussians: k means uniformly spaced on a circle,
/// per-coordinate variance covariance_scale.
struct RingMixtureSpec {
  int mode_count = 1;
  double radius = 1.0;
  double covariance_scale = 1.0;
  int dimension = 2;

  void validate() const;
};

RingMixtureSpec make_ring_mixture(int mode_count, double radius, double covariance_scale);
Matrix mixture_centers(const RingMixtureSpec& spec);  // k x 2, center 0 at (radius, 0)
Matrix sample_mixture(const RingMixtureSpec& spec, int n, Rng& rng);

struct NoiseSpec {
  enum class Dist { Gaussian, Uniform };
  Dist distribution = Dist::Gaussian;
  int dimension = 1;

  void validate() const;
};

// gaussian: iid standard normal; uniform: iid on [-1, 1]
Matrix sample_noise(const NoiseSpec& spec, int n, Rng& rng);

/// Softmax-normalized RBF features: component j proportional to
/// exp(-|x - anchor_j|^2 / T), normalized to sum to one.
Vector rbf_features(const Vector& x, const Matrix& anchors, double temperature);
Matrix rbf_features_batch(const Matrix& X, const Matrix& anchors, double temperature);

/// Differentiable feature map phi(x) for linear discriminators.
struct FeatureMap {
  enum class Kind { Identity, Rbf, RandomNet };
  Kind kind = Kind::Identity;

  // rbf
  Matrix anchors;
  double temperature = 0.2;

  // random_net: frozen randomly initialized network; features are the
  // concatenated hidden activations (or just the output when concat is off)
  MLPSpec net_spec;
  ParamVector net_params;
  bool concat_layers = true;

  static FeatureMap identity();
  static FeatureMap rbf(Matrix anchors, double temperature);
  static FeatureMap random_net(MLPSpec spec, ParamVector params, bool concat_layers = true);

  int output_dim(int input_dim) const;
  void validate() const;
};

struct FeatureTape {
  FeatureMap::Kind kind = FeatureMap::Kind::Identity;
  Matrix inputs;
  Matrix feats;
  Tape net_tape;
};

struct FeatureForward {
  Matrix feats;
  FeatureTape tape;
};

FeatureForward feature_forward(const FeatureMap& map, const Matrix& X);
/// Pull feature adjoints back to input adjoints (map parameters are frozen).
Matrix feature_backward(const FeatureMap& map, const FeatureTape& tape,
                        const Matrix& feat_adjoints);

// Dataset snapshot: CSV matrix dump plus a JSON sidecar with the generating spec.
void save_dataset(const std::string& csv_path, const std::string& json_path, const Matrix& X,
                  const RingMixtureSpec& spec, unsigned long seed,
                  const std::string& config_hash = {});
std::pair<Matrix, RingMixtureSpec> load_dataset(const std::string& csv_path,
                                                const std::string& json_path);

}  // namespace dualgan
