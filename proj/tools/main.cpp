#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dualgan/errors.hpp"
#include "dualgan/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitAcceptance = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GAN training through the discriminator's convex dual"};
  app.require_subcommand(1);

  std::string config_path;
  bool with_plots = false;
  CLI::App* train = app.add_subcommand("train", "run one experiment from a config file");
  train->add_option("--config", config_path, "experiment config (JSON)")->required();
  train->add_flag("--plots", with_plots, "render SVG plots into the artifact directory");

  std::string sweep_config;
  int sweep_trials = 0;
  unsigned long sweep_seed = 0;
  CLI::App* sweep = app.add_subcommand("sweep", "random hyperparameter sweep over trainers");
  sweep->add_option("--config", sweep_config, "sweep config (JSON)")->required();
  sweep->add_option("--trials", sweep_trials, "number of sampled settings")->required();
  sweep->add_option("--seed", sweep_seed, "sweep seed")->required();

  int check_trials = 20;
  unsigned long check_seed = 0;
  CLI::App* check = app.add_subcommand("check-duality",
                                       "randomized verification of the dual constructions");
  check->add_option("--trials", check_trials, "instances per construction")->required();
  check->add_option("--seed", check_seed, "instance seed")->required();

  std::string report_dir;
  CLI::App* report = app.add_subcommand("report", "regenerate plots from an artifact directory");
  report->add_option("--dir", report_dir, "artifact directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (train->parsed()) {
      const std::string dir = dualgan::run_experiment(config_path, with_plots);
      std::cout << "artifacts written to " << dir << "\n";
      return kExitOk;
    }
    if (sweep->parsed()) {
      const dualgan::SweepSummary summary =
          dualgan::run_sweep(sweep_config, sweep_trials, sweep_seed);
      for (const auto& [trainer, rate] : summary.success_rates) {
        std::printf("%-12s success rate %.3f\n", trainer.c_str(), rate);
      }
      std::cout << "sweep artifacts written to " << summary.output_dir << "\n";
      return kExitOk;
    }
    if (check->parsed()) {
      const dualgan::DualityCheckResult res = dualgan::check_duality(check_trials, check_seed);
      for (const auto& line : res.lines) std::cout << line << "\n";
      std::cout << res.instances - res.failures << "/" << res.instances << " checks passed\n";
      return res.passed() ? kExitOk : kExitAcceptance;
    }
    if (report->parsed()) {
      dualgan::report_experiment(report_dir);
      std::cout << "plots regenerated in " << report_dir << "\n";
      return kExitOk;
    }
  } catch (const dualgan::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}
