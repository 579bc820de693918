#include "dualgan/scorer.hpp"

#include "dualgan/errors.hpp"

namespace dualgan {

Scorer Scorer::linear(FeatureMap features, int input_dim) {
  Scorer s;
  s.kind = Kind::LinearFeatures;
  s.features = std::move(features);
  s.input_dim = input_dim;
  s.validate();
  return s;
}

Scorer Scorer::mlp(MLPSpec net) {
  Scorer s;
  s.kind = Kind::Mlp;
  s.net = std::move(net);
  s.validate();
  return s;
}

void Scorer::validate() const {
  if (kind == Kind::LinearFeatures) {
    features.validate();
    if (input_dim < 1) throw ValidationError("Scorer: input_dim must be >= 1");
  } else {
    net.validate();
    if (net.output_dim() != 1) throw ValidationError("Scorer: network must output one score");
  }
}

int Scorer::param_count() const {
  return kind == Kind::LinearFeatures ? features.output_dim(input_dim) : net.param_count();
}

ScoreResult score(const Scorer& scorer, const Vector& w, const Matrix& X) {
  scorer.validate();
  if (w.size() != scorer.param_count()) {
    throw ValidationError("score: weight vector has wrong length");
  }
  ScoreResult out;
  out.tape.kind = scorer.kind;
  if (scorer.kind == Scorer::Kind::LinearFeatures) {
    FeatureForward fwd = feature_forward(scorer.features, X);
    out.scores = fwd.feats * w;
    out.tape.feats = std::move(fwd.feats);
    out.tape.feat_tape = std::move(fwd.tape);
    out.tape.w = w;
  } else {
    ForwardResult fwd = forward_mlp(scorer.net, params_from_values(scorer.net, w), X);
    out.scores = fwd.outputs.col(0);
    out.tape.net_tape = std::move(fwd.tape);
  }
  return out;
}

Vector score_grad_w(const Scorer& scorer, const ScorerTape& tape, const Vector& adjoints) {
  if (scorer.kind == Scorer::Kind::LinearFeatures) {
    return tape.feats.transpose() * adjoints;
  }
  return grad_params(tape.net_tape, adjoints).values;
}

Matrix score_grad_x(const Scorer& scorer, const ScorerTape& tape, const Vector& adjoints) {
  if (scorer.kind == Scorer::Kind::LinearFeatures) {
    const Matrix feat_adjoints = adjoints * tape.w.transpose();
    return feature_backward(scorer.features, tape.feat_tape, feat_adjoints);
  }
  return grad_inputs(tape.net_tape, adjoints);
}

Matrix score_per_sample_grads(const Scorer& scorer, const Vector& w, const Matrix& X) {
  scorer.validate();
  if (scorer.kind == Scorer::Kind::LinearFeatures) {
    return feature_forward(scorer.features, X).feats;
  }
  return per_sample_score_grads(scorer.net, params_from_values(scorer.net, w), X);
}

Vector init_scorer_params(const Scorer& scorer, Rng& rng) {
  scorer.validate();
  if (scorer.kind == Scorer::Kind::LinearFeatures) {
    return Vector::Zero(scorer.param_count());
  }
  return random_params(scorer.net, rng).values;
}

}  // namespace dualgan
