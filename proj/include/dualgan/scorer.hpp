#pragma once

#include "dualgan/autodiff.hpp"
#include "dualgan/data_features.hpp"
#include "dualgan/types.hpp"

namespace dualgan {

/// Discriminator scoring function F(w, x): either linear in a fixed feature
/// map (w is the feature weight vector) or a small network (w is the flat
/// parameter vector).
struct Scorer {
  enum class Kind { LinearFeatures, Mlp };
  Kind kind = Kind::LinearFeatures;

  FeatureMap features;  // linear
  int input_dim = 0;

  MLPSpec net;  // mlp

  static Scorer linear(FeatureMap features, int input_dim);
  static Scorer mlp(MLPSpec net);

  int param_count() const;
  void validate() const;
};

struct ScorerTape {
  Scorer::Kind kind = Scorer::Kind::LinearFeatures;
  FeatureTape feat_tape;
  Matrix feats;
  Vector w;
  Tape net_tape;
};

struct ScoreResult {
  Vector scores;
  ScorerTape tape;
};

ScoreResult score(const Scorer& scorer, const Vector& w, const Matrix& X);
Vector score_grad_w(const Scorer& scorer, const ScorerTape& tape, const Vector& adjoints);
Matrix score_grad_x(const Scorer& scorer, const ScorerTape& tape, const Vector& adjoints);
/// Row i = dF(w, x_i)/dw.
Matrix score_per_sample_grads(const Scorer& scorer, const Vector& w, const Matrix& X);

Vector init_scorer_params(const Scorer& scorer, Rng& rng);

}  // namespace dualgan
