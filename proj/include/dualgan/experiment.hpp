#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dualgan/data_features.hpp"
#include "dualgan/metrics.hpp"
#include "dualgan/training.hpp"

namespace dualgan {

struct DatasetConfig {
  int modes = 5;
  double radius = 2.0;
  double covariance_scale = 0.1;
  int size = 1000;
};

struct FeatureConfig {
  std::string kind = "rbf";  // identity | rbf | random_net
  int anchors = 100;
  double temperature = 0.2;
  std::vector<int> hidden = {16};
  std::string activation = "tanh";
  bool concat_layers = true;
};

/// File-form experiment description; strict parse (unknown keys rejected).
struct ExperimentConfig {
  std::string trainer = "dual_linear";
  unsigned long seed = 0;
  int iterations = 2000;
  int batch_size = 100;
  DatasetConfig dataset;
  NoiseSpec noise{NoiseSpec::Dist::Gaussian, 8};
  std::vector<int> generator_hidden = {20, 20};
  std::string generator_activation = "relu";
  std::optional<std::vector<int>> discriminator_hidden;
  std::string discriminator_activation = "relu";
  FeatureConfig features;
  double gen_lr = 1e-3;
  double gen_beta1 = 0.9;
  double gen_beta2 = 0.999;
  double disc_lr = 1e-3;
  double disc_beta1 = 0.9;
  double disc_beta2 = 0.999;
  double C = 1e-4;
  bool delta_adaptive = true;
  double delta_value = 0.1;
  int generator_steps_per_iter = 1;
  bool line_search = false;
  bool fixed_noise = false;
  double dual_tol = 1e-8;
  int dual_max_iter = 5000;
  int sample_every = 500;
  int sample_count = 1000;
  bool record_wall_time = true;
  std::string output_dir;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

/// 64-bit FNV-1a fingerprint of the config text, recorded in artifact headers.
std::string config_fingerprint(const std::string& text);

struct BuiltExperiment {
  TrainConfig train;
  RingMixtureSpec data_spec;
  Matrix dataset;
};

/// Draws the dataset and feature anchors and assembles the train config.
BuiltExperiment build_experiment(const ExperimentConfig& config);

/// Runs the experiment and writes the artifact directory: config snapshot,
/// dataset snapshot, curves.csv, lambda_hist.csv, samples_*.csv, checkpoint,
/// coverage.json, and (optionally) SVG plots. Returns the directory path.
std::string run_experiment(const std::string& config_path, bool with_plots);

/// Regenerates every plot in an artifact directory from its CSV files.
void report_experiment(const std::string& dir);

struct SweepTrialResult {
  int trial = 0;
  std::string trainer;
  int covered_modes = 0;
  int mode_count = 0;
  bool success = false;
  std::string error;  // empty on success
};

struct SweepSummary {
  std::vector<SweepTrialResult> trials;
  std::vector<std::pair<std::string, double>> success_rates;
  std::string output_dir;
};

SweepSummary run_sweep(const std::string& sweep_config_path, int trials, unsigned long seed);

struct DualityCheckResult {
  int instances = 0;
  int failures = 0;
  std::vector<std::string> lines;
  bool passed() const { return failures == 0; }
};

/// Randomized verification of the two dual constructions: strong duality,
/// weight/step recovery, feasibility, and complementary slackness.
DualityCheckResult check_duality(int trials, unsigned long seed);

}  // namespace dualgan
