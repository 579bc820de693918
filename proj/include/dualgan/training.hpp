#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dualgan/autodiff.hpp"
#include "dualgan/data_features.hpp"
#include "dualgan/scorer.hpp"
#include "dualgan/types.hpp"

namespace dualgan {

enum class TrainerKind { Standard, DualLinear, TrCostLin, TrScoreLin };

std::string to_string(TrainerKind k);
TrainerKind trainer_kind_from_string(const std::string& s);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Vector first_moment;
  Vector second_moment;
  long step_count = 0;
};

AdamState make_adam_state(int dim);
/// One bias-corrected descent step on grad; pass -grad for ascent.
void adam_step(Vector& params, const Vector& grad, AdamState& state, const AdamConfig& cfg);

/// f = -(1/2n) sum log sigma(F_x_i) - (1/2n) sum log(1 - sigma(F_z_i)),
/// evaluated from raw scores via stable softplus forms; always >= 0.
double gan_objective(const Vector& scores_x, const Vector& scores_z);

struct DeltaSchedule {
  bool adaptive = false;
  double value = 0.1;
};

struct TrainConfig {
  TrainerKind kind = TrainerKind::DualLinear;
  int batch_size = 100;
  int iterations = 2000;
  MLPSpec generator;
  AdamConfig gen_adam;
  AdamConfig disc_adam;
  std::optional<MLPSpec> disc_net;  // nonlinear scorer for standard / trust-region
  FeatureMap features;              // linear scorer otherwise
  NoiseSpec noise{NoiseSpec::Dist::Gaussian, 8};
  double C = 1e-4;
  DeltaSchedule delta;
  int generator_steps_per_iter = 1;
  bool line_search = false;
  bool fixed_noise = false;
  unsigned long seed = 0;
  double dual_tol = 1e-8;
  int dual_max_iter = 5000;
  int sample_every = 0;  // 0: only a final dump
  int sample_count = 1000;
  bool check_weak_duality = false;  // test instrumentation: assert g <= f at random w
  bool record_wall_time = true;

  void validate() const;
};

struct TrainRecord {
  int iter = 0;
  double f_primal = 0.0;
  double g_dual_or_model = 0.0;
  double disc_acc = 0.0;
  double lambda_median = 0.0;
  double lambda_p10 = 0.0;
  double lambda_p90 = 0.0;
  double delta = 0.0;
  double rho = 0.0;
  double wall_ms = 0.0;
};

struct SampleDump {
  int iter = 0;
  Matrix samples;
};

struct TrainLog {
  std::vector<TrainRecord> records;
  std::vector<SampleDump> samples;
  std::vector<Vector> lambda_snapshots;  // rescaled 2n*lambda per logged iteration
  ParamVector final_generator;
  std::vector<std::string> warnings;
};

/// Streaming callbacks so artifacts survive a mid-run failure.
struct TrainHooks {
  std::function<void(const TrainRecord&)> on_record;
  std::function<void(const SampleDump&)> on_samples;
  std::function<void(int iter, const Vector& rescaled_lambdas)> on_lambdas;
};

TrainLog train_dual_linear_fullbatch(const TrainConfig& config, const Matrix& dataset,
                                     const TrainHooks& hooks = {});
TrainLog train_dual_linear_minibatch(const TrainConfig& config, const Matrix& dataset,
                                     const TrainHooks& hooks = {});
TrainLog train_trust_region(const TrainConfig& config, const Matrix& dataset,
                            const TrainHooks& hooks = {});
TrainLog train_standard_gan(const TrainConfig& config, const Matrix& dataset,
                            const TrainHooks& hooks = {});

/// Dispatch on config.kind (dual_linear with line_search runs full batch).
TrainLog train(const TrainConfig& config, const Matrix& dataset, const TrainHooks& hooks = {});

}  // namespace dualgan
