#include "dualgan/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dualgan/dual_linear.hpp"
#include "dualgan/errors.hpp"
#include "dualgan/reference.hpp"
#include "dualgan/scorer.hpp"
#include "dualgan/svg_plot.hpp"
#include "dualgan/trust_region.hpp"

namespace dualgan {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string config_fingerprint(const std::string& text) {
  unsigned long long h = 1469598103934665603ULL;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

namespace {

constexpr int kHistogramBins = 20;
constexpr const char* kCurvesHeader =
    "iter,f_primal,g_dual_or_model,disc_acc,lambda_median,lambda_p10,lambda_p90,delta,rho,"
    "wall_ms";

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open file for writing: " + path);
  out << text;
}

void reject_unknown_keys(const json& j, const std::string& where,
                         const std::vector<std::string>& allowed) {
  if (!j.is_object()) throw ValidationError("config: '" + where + "' must be an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ValidationError("config: unknown key '" + where + "." + item.key() + "'");
    }
  }
}

double get_number(const json& j, const std::string& where, const std::string& key,
                  double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    throw ValidationError("config: '" + where + "." + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& where, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) {
    throw ValidationError("config: '" + where + "." + key + "' must be an integer");
  }
  return j.at(key).get<int>();
}

bool get_bool(const json& j, const std::string& where, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) {
    throw ValidationError("config: '" + where + "." + key + "' must be a boolean");
  }
  return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& where, const std::string& key,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) {
    throw ValidationError("config: '" + where + "." + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

std::vector<int> get_int_list(const json& j, const std::string& where, const std::string& key,
                              const std::vector<int>& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_array()) {
    throw ValidationError("config: '" + where + "." + key + "' must be an integer array");
  }
  std::vector<int> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number_integer()) {
      throw ValidationError("config: '" + where + "." + key + "' must be an integer array");
    }
    out.push_back(v.get<int>());
  }
  return out;
}

ExperimentConfig parse_experiment_json(const json& j) {
  reject_unknown_keys(
      j, "config",
      {"trainer",       "seed",           "iterations",      "batch_size",
       "dataset",       "noise",          "generator",       "discriminator",
       "features",      "gen_lr",         "gen_beta1",       "gen_beta2",
       "disc_lr",       "disc_beta1",     "disc_beta2",      "C",
       "delta",         "generator_steps_per_iter",          "line_search",
       "fixed_noise",   "dual_tol",       "dual_max_iter",   "sample_every",
       "sample_count",  "record_wall_time",                  "output_dir"});

  ExperimentConfig cfg;
  cfg.trainer = get_string(j, "config", "trainer", cfg.trainer);
  const double seed_num = get_number(j, "config", "seed", 0.0);
  if (seed_num < 0.0) throw ValidationError("config: 'seed' must be non-negative");
  cfg.seed = static_cast<unsigned long>(seed_num);
  cfg.iterations = get_int(j, "config", "iterations", cfg.iterations);
  cfg.batch_size = get_int(j, "config", "batch_size", cfg.batch_size);

  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    reject_unknown_keys(d, "dataset", {"modes", "radius", "covariance_scale", "size"});
    cfg.dataset.modes = get_int(d, "dataset", "modes", cfg.dataset.modes);
    cfg.dataset.radius = get_number(d, "dataset", "radius", cfg.dataset.radius);
    cfg.dataset.covariance_scale =
        get_number(d, "dataset", "covariance_scale", cfg.dataset.covariance_scale);
    cfg.dataset.size = get_int(d, "dataset", "size", cfg.dataset.size);
  }

  if (j.contains("noise")) {
    const json& noise = j.at("noise");
    reject_unknown_keys(noise, "noise", {"distribution", "dimension"});
    const std::string dist = get_string(noise, "noise", "distribution", "gaussian");
    if (dist == "gaussian") {
      cfg.noise.distribution = NoiseSpec::Dist::Gaussian;
    } else if (dist == "uniform") {
      cfg.noise.distribution = NoiseSpec::Dist::Uniform;
    } else {
      throw ValidationError("config: 'noise.distribution' must be gaussian or uniform");
    }
    cfg.noise.dimension = get_int(noise, "noise", "dimension", cfg.noise.dimension);
  }

  if (j.contains("generator")) {
    const json& g = j.at("generator");
    reject_unknown_keys(g, "generator", {"hidden", "activation"});
    cfg.generator_hidden = get_int_list(g, "generator", "hidden", cfg.generator_hidden);
    cfg.generator_activation =
        get_string(g, "generator", "activation", cfg.generator_activation);
  }

  if (j.contains("discriminator")) {
    const json& d = j.at("discriminator");
    reject_unknown_keys(d, "discriminator", {"hidden", "activation"});
    cfg.discriminator_hidden = get_int_list(d, "discriminator", "hidden", {20});
    cfg.discriminator_activation =
        get_string(d, "discriminator", "activation", cfg.discriminator_activation);
  }

  if (j.contains("features")) {
    const json& f = j.at("features");
    reject_unknown_keys(
        f, "features",
        {"kind", "anchors", "temperature", "hidden", "activation", "concat_layers"});
    cfg.features.kind = get_string(f, "features", "kind", cfg.features.kind);
    cfg.features.anchors = get_int(f, "features", "anchors", cfg.features.anchors);
    cfg.features.temperature =
        get_number(f, "features", "temperature", cfg.features.temperature);
    cfg.features.hidden = get_int_list(f, "features", "hidden", cfg.features.hidden);
    cfg.features.activation = get_string(f, "features", "activation", cfg.features.activation);
    cfg.features.concat_layers =
        get_bool(f, "features", "concat_layers", cfg.features.concat_layers);
  }

  cfg.gen_lr = get_number(j, "config", "gen_lr", cfg.gen_lr);
  cfg.gen_beta1 = get_number(j, "config", "gen_beta1", cfg.gen_beta1);
  cfg.gen_beta2 = get_number(j, "config", "gen_beta2", cfg.gen_beta2);
  cfg.disc_lr = get_number(j, "config", "disc_lr", cfg.disc_lr);
  cfg.disc_beta1 = get_number(j, "config", "disc_beta1", cfg.disc_beta1);
  cfg.disc_beta2 = get_number(j, "config", "disc_beta2", cfg.disc_beta2);
  cfg.C = get_number(j, "config", "C", cfg.C);

  if (j.contains("delta")) {
    const json& d = j.at("delta");
    reject_unknown_keys(d, "delta", {"mode", "value"});
    const std::string mode = get_string(d, "delta", "mode", "adaptive");
    if (mode == "adaptive") {
      cfg.delta_adaptive = true;
    } else if (mode == "fixed") {
      cfg.delta_adaptive = false;
    } else {
      throw ValidationError("config: 'delta.mode' must be fixed or adaptive");
    }
    cfg.delta_value = get_number(d, "delta", "value", cfg.delta_value);
  }

  cfg.generator_steps_per_iter =
      get_int(j, "config", "generator_steps_per_iter", cfg.generator_steps_per_iter);
  cfg.line_search = get_bool(j, "config", "line_search", cfg.line_search);
  cfg.fixed_noise = get_bool(j, "config", "fixed_noise", cfg.fixed_noise);
  cfg.dual_tol = get_number(j, "config", "dual_tol", cfg.dual_tol);
  cfg.dual_max_iter = get_int(j, "config", "dual_max_iter", cfg.dual_max_iter);
  cfg.sample_every = get_int(j, "config", "sample_every", cfg.sample_every);
  cfg.sample_count = get_int(j, "config", "sample_count", cfg.sample_count);
  cfg.record_wall_time = get_bool(j, "config", "record_wall_time", cfg.record_wall_time);
  cfg.output_dir = get_string(j, "config", "output_dir", cfg.output_dir);

  // field-level validation with config key names
  if (cfg.iterations < 0) throw ValidationError("config: 'iterations' must be >= 0");
  if (cfg.batch_size < 1) throw ValidationError("config: 'batch_size' must be >= 1");
  if (!(cfg.gen_lr > 0.0)) throw ValidationError("config: 'gen_lr' must be positive");
  if (!(cfg.disc_lr > 0.0)) throw ValidationError("config: 'disc_lr' must be positive");
  if (!(cfg.C > 0.0)) throw ValidationError("config: 'C' must be positive");
  if (!(cfg.delta_value > 0.0)) throw ValidationError("config: 'delta.value' must be positive");
  if (!(cfg.dual_tol > 0.0)) throw ValidationError("config: 'dual_tol' must be positive");
  if (cfg.dataset.modes < 1) throw ValidationError("config: 'dataset.modes' must be >= 1");
  if (cfg.dataset.size < 1) throw ValidationError("config: 'dataset.size' must be >= 1");
  if (!(cfg.dataset.radius > 0.0)) {
    throw ValidationError("config: 'dataset.radius' must be positive");
  }
  if (!(cfg.dataset.covariance_scale > 0.0)) {
    throw ValidationError("config: 'dataset.covariance_scale' must be positive");
  }
  trainer_kind_from_string(cfg.trainer);
  return cfg;
}

int line_of_byte(const std::string& text, size_t byte) {
  int line = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_record(const TrainRecord& r) {
  std::string out = std::to_string(r.iter);
  for (double v : {r.f_primal, r.g_dual_or_model, r.disc_acc, r.lambda_median, r.lambda_p10,
                   r.lambda_p90, r.delta, r.rho, r.wall_ms}) {
    out += "," + format_double(v);
  }
  return out;
}

void write_matrix_csv(const std::string& path, const Matrix& m, const std::string& hash) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open file for writing: " + path);
  if (!hash.empty()) out << "# config=" << hash << "\n";
  out.precision(17);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ",";
      out << m(i, j);
    }
    out << "\n";
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw ValidationError("csv column not found: " + name);
  }
  std::vector<double> values(const std::string& name) const {
    const int c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
};

CsvTable read_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  CsvTable table;
  std::string line;
  bool header_done = !has_header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header_done) {
      table.header = cells;
      header_done = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
    table.rows.push_back(std::move(row));
  }
  return table;
}

Matrix table_to_matrix(const CsvTable& t) {
  if (t.rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<int>(t.rows.size()), static_cast<int>(t.rows[0].size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = t.rows[i][j];
  return m;
}

json feature_map_to_json(const FeatureMap& fm) {
  json j;
  switch (fm.kind) {
    case FeatureMap::Kind::Identity:
      j["kind"] = "identity";
      break;
    case FeatureMap::Kind::Rbf: {
      j["kind"] = "rbf";
      j["temperature"] = fm.temperature;
      std::vector<std::vector<double>> anchors;
      for (int i = 0; i < fm.anchors.rows(); ++i) {
        anchors.push_back({fm.anchors(i, 0), fm.anchors(i, 1)});
      }
      j["anchors"] = anchors;
      break;
    }
    case FeatureMap::Kind::RandomNet: {
      j["kind"] = "random_net";
      j["layer_sizes"] = fm.net_spec.layer_sizes;
      std::vector<std::string> acts;
      for (Activation a : fm.net_spec.activations) acts.push_back(to_string(a));
      j["activations"] = acts;
      j["concat_layers"] = fm.concat_layers;
      j["values"] = std::vector<double>(fm.net_params.values.data(),
                                        fm.net_params.values.data() + fm.net_params.size());
      break;
    }
  }
  return j;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError("config parse error at line " +
                          std::to_string(line_of_byte(json_text, e.byte)) + ": " + e.what());
  }
  return parse_experiment_json(j);
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_text_file(path));
}

BuiltExperiment build_experiment(const ExperimentConfig& cfg) {
  // streams 0..4 belong to the trainers; 5 draws the dataset, 6 the features
  Rng rng_data(cfg.seed * 8 + 5);
  Rng rng_feat(cfg.seed * 8 + 6);

  BuiltExperiment built;
  built.data_spec =
      make_ring_mixture(cfg.dataset.modes, cfg.dataset.radius, cfg.dataset.covariance_scale);
  built.dataset = sample_mixture(built.data_spec, cfg.dataset.size, rng_data);

  FeatureMap features;
  if (cfg.features.kind == "identity") {
    features = FeatureMap::identity();
  } else if (cfg.features.kind == "rbf") {
    if (cfg.features.anchors < 1) {
      throw ValidationError("config: 'features.anchors' must be >= 1");
    }
    const int m = std::min(cfg.features.anchors, cfg.dataset.size);
    std::vector<int> idx(cfg.dataset.size);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng_feat);
    Matrix anchors(m, 2);
    for (int i = 0; i < m; ++i) anchors.row(i) = built.dataset.row(idx[i]);
    features = FeatureMap::rbf(std::move(anchors), cfg.features.temperature);
  } else if (cfg.features.kind == "random_net") {
    std::vector<int> sizes = {2};
    sizes.insert(sizes.end(), cfg.features.hidden.begin(), cfg.features.hidden.end());
    sizes.push_back(1);
    MLPSpec spec = make_mlp_spec(sizes, activation_from_string(cfg.features.activation));
    ParamVector params = random_params(spec, rng_feat);
    features = FeatureMap::random_net(std::move(spec), std::move(params),
                                      cfg.features.concat_layers);
  } else {
    throw ValidationError("config: 'features.kind' must be identity, rbf or random_net");
  }

  TrainConfig train;
  train.kind = trainer_kind_from_string(cfg.trainer);
  train.batch_size = cfg.batch_size;
  train.iterations = cfg.iterations;
  std::vector<int> gen_sizes = {cfg.noise.dimension};
  gen_sizes.insert(gen_sizes.end(), cfg.generator_hidden.begin(), cfg.generator_hidden.end());
  gen_sizes.push_back(2);
  train.generator =
      make_mlp_spec(gen_sizes, activation_from_string(cfg.generator_activation));
  train.gen_adam = {cfg.gen_lr, cfg.gen_beta1, cfg.gen_beta2, 1e-8};
  train.disc_adam = {cfg.disc_lr, cfg.disc_beta1, cfg.disc_beta2, 1e-8};
  if (cfg.discriminator_hidden.has_value()) {
    std::vector<int> disc_sizes = {2};
    disc_sizes.insert(disc_sizes.end(), cfg.discriminator_hidden->begin(),
                      cfg.discriminator_hidden->end());
    disc_sizes.push_back(1);
    train.disc_net =
        make_mlp_spec(disc_sizes, activation_from_string(cfg.discriminator_activation));
  }
  train.features = features;
  train.noise = cfg.noise;
  train.C = cfg.C;
  train.delta = {cfg.delta_adaptive, cfg.delta_value};
  train.generator_steps_per_iter = cfg.generator_steps_per_iter;
  train.line_search = cfg.line_search;
  train.fixed_noise = cfg.fixed_noise;
  train.seed = cfg.seed;
  train.dual_tol = cfg.dual_tol;
  train.dual_max_iter = cfg.dual_max_iter;
  train.sample_every = cfg.sample_every;
  train.sample_count = cfg.sample_count;
  train.record_wall_time = cfg.record_wall_time;
  train.validate();

  built.train = std::move(train);
  return built;
}

std::string run_experiment(const std::string& config_path, bool with_plots) {
  const std::string text = read_text_file(config_path);
  const ExperimentConfig cfg = parse_experiment_config(text);
  if (cfg.output_dir.empty()) {
    throw ValidationError("config: 'output_dir' is required for run");
  }
  const std::string hash = config_fingerprint(text);

  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  write_text_file((dir / "config.json").string(), text);

  const BuiltExperiment built = build_experiment(cfg);
  save_dataset((dir / "dataset.csv").string(), (dir / "dataset.json").string(), built.dataset,
               built.data_spec, cfg.seed, hash);
  {
    json fj = feature_map_to_json(built.train.features);
    fj["config_hash"] = hash;
    write_text_file((dir / "features.json").string(), fj.dump(2) + "\n");
  }

  std::ofstream curves((dir / "curves.csv").string());
  if (!curves) throw ValidationError("cannot open curves.csv for writing");
  curves << "# config=" << hash << "\n" << kCurvesHeader << "\n";

  std::ofstream lhist;
  const int n = built.train.batch_size;

  TrainHooks hooks;
  hooks.on_record = [&](const TrainRecord& r) { curves << format_record(r) << "\n"; };
  hooks.on_samples = [&](const SampleDump& d) {
    char name[32];
    std::snprintf(name, sizeof name, "samples_%06d.csv", d.iter);
    write_matrix_csv((dir / name).string(), d.samples, hash);
  };
  hooks.on_lambdas = [&](int iter, const Vector& rescaled) {
    if (!lhist.is_open()) {
      lhist.open((dir / "lambda_hist.csv").string());
      lhist << "# config=" << hash << "\niter";
      for (int b = 0; b < kHistogramBins; ++b) lhist << ",bin_" << b;
      lhist << "\n";
    }
    const Vector raw = rescaled / (2.0 * n);
    const Vector hist = lambda_histogram(raw, n, kHistogramBins);
    lhist << iter;
    for (int b = 0; b < kHistogramBins; ++b) lhist << "," << format_double(hist[b]);
    lhist << "\n";
  };

  TrainLog log;
  try {
    log = train(built.train, built.dataset, hooks);
  } catch (const std::exception& e) {
    curves.flush();
    write_text_file((dir / "error.txt").string(), std::string(e.what()) + "\n");
    throw;
  }
  curves.flush();

  save_checkpoint((dir / "checkpoint.json").string(), built.train.generator,
                  log.final_generator, hash);

  if (!log.samples.empty()) {
    const CoverageReport coverage = mode_coverage(log.samples.back().samples, built.data_spec);
    json cj;
    cj["config_hash"] = hash;
    cj["mode_count"] = built.data_spec.mode_count;
    cj["covered_modes"] = coverage.covered_modes;
    cj["counts"] = coverage.counts;
    cj["threshold"] = coverage.threshold;
    cj["k_sigma"] = coverage.k_sigma;
    cj["sample_count"] = coverage.sample_count;
    cj["all_covered"] = coverage.all_covered(built.data_spec.mode_count);
    write_text_file((dir / "coverage.json").string(), cj.dump(2) + "\n");
  }

  if (!log.warnings.empty()) {
    std::string w;
    for (const auto& s : log.warnings) w += s + "\n";
    write_text_file((dir / "warnings.txt").string(), w);
  }

  if (with_plots) report_experiment(cfg.output_dir);
  return cfg.output_dir;
}

void report_experiment(const std::string& dir_str) {
  const fs::path dir(dir_str);
  if (!fs::exists(dir / "curves.csv")) {
    throw ValidationError("report: no curves.csv in " + dir_str);
  }
  const std::string hash = fs::exists(dir / "config.json")
                               ? config_fingerprint(read_text_file((dir / "config.json").string()))
                               : std::string();

  const CsvTable curves = read_csv((dir / "curves.csv").string(), true);
  const std::vector<double> iters = curves.values("iter");

  write_line_chart((dir / "curves.svg").string(), "training objectives", "iteration", "value",
                   {{"f_primal", iters, curves.values("f_primal"), "#1f77b4"},
                    {"g_dual_or_model", iters, curves.values("g_dual_or_model"), "#2ca02c"}},
                   hash);
  write_line_chart((dir / "disc_acc.svg").string(), "discriminator accuracy", "iteration",
                   "accuracy", {{"disc_acc", iters, curves.values("disc_acc"), "#d62728"}},
                   hash);

  std::vector<ScatterSet> sets;
  if (fs::exists(dir / "dataset.csv")) {
    sets.push_back({"data", table_to_matrix(read_csv((dir / "dataset.csv").string(), false)),
                    "#1f77b4"});
  }
  std::string latest;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("samples_", 0) == 0 && name.size() > 4 &&
        name.substr(name.size() - 4) == ".csv" && name > latest) {
      latest = name;
    }
  }
  if (!latest.empty()) {
    sets.push_back({"generated", table_to_matrix(read_csv((dir / latest).string(), false)),
                    "#2ca02c"});
  }
  if (!sets.empty()) {
    write_scatter_chart((dir / "samples.svg").string(), "data and generated samples", sets, hash);
  }

  if (fs::exists(dir / "lambda_hist.csv")) {
    const CsvTable hist = read_csv((dir / "lambda_hist.csv").string(), true);
    if (!hist.rows.empty()) {
      Matrix masses(static_cast<int>(hist.rows.size()),
                    static_cast<int>(hist.header.size()) - 1);
      for (int i = 0; i < masses.rows(); ++i)
        for (int b = 0; b < masses.cols(); ++b) masses(i, b) = hist.rows[i][b + 1];
      write_histogram_heatmap((dir / "lambda_hist.svg").string(),
                              "dual weight distribution over training", hist.values("iter"),
                              masses, hash);
    }
  }
}

namespace {

json sample_space_value(const json& sampler, const std::string& key, Rng& rng) {
  reject_unknown_keys(sampler, "space." + key, {"randint", "rand", "enr", "choice"});
  if (sampler.size() != 1) {
    throw ValidationError("config: 'space." + key + "' must hold exactly one sampler");
  }
  if (sampler.contains("randint")) {
    const auto range = sampler.at("randint").get<std::vector<long>>();
    if (range.size() != 2 || range[0] > range[1]) {
      throw ValidationError("config: 'space." + key + ".randint' needs [lo, hi]");
    }
    std::uniform_int_distribution<long> pick(range[0], range[1]);
    return pick(rng);
  }
  if (sampler.contains("rand")) {
    const auto range = sampler.at("rand").get<std::vector<double>>();
    if (range.size() != 2 || range[0] > range[1]) {
      throw ValidationError("config: 'space." + key + ".rand' needs [lo, hi]");
    }
    std::uniform_real_distribution<double> pick(range[0], range[1]);
    return pick(rng);
  }
  if (sampler.contains("enr")) {
    // exp(-randint[a, b]) for hyperparameters explored in log scale
    const auto range = sampler.at("enr").get<std::vector<long>>();
    if (range.size() != 2 || range[0] > range[1]) {
      throw ValidationError("config: 'space." + key + ".enr' needs [lo, hi]");
    }
    std::uniform_int_distribution<long> pick(range[0], range[1]);
    return std::exp(-static_cast<double>(pick(rng)));
  }
  const auto& choices = sampler.at("choice");
  if (!choices.is_array() || choices.empty()) {
    throw ValidationError("config: 'space." + key + ".choice' needs a non-empty array");
  }
  std::uniform_int_distribution<size_t> pick(0, choices.size() - 1);
  return choices.at(pick(rng));
}

void assign_config_path(json& config, const std::string& dotted, const json& value) {
  json* node = &config;
  size_t start = 0;
  while (true) {
    const size_t dot = dotted.find('.', start);
    if (dot == std::string::npos) {
      (*node)[dotted.substr(start)] = value;
      return;
    }
    node = &(*node)[dotted.substr(start, dot - start)];
    start = dot + 1;
  }
}

}  // namespace

SweepSummary run_sweep(const std::string& sweep_config_path, int trials, unsigned long seed) {
  if (trials < 1) throw ValidationError("sweep: trials must be >= 1");
  const std::string text = read_text_file(sweep_config_path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("sweep config parse error at line " +
                          std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
  }
  reject_unknown_keys(j, "sweep", {"output_dir", "trainers", "base", "space"});
  if (!j.contains("output_dir") || !j.contains("trainers") || !j.contains("base")) {
    throw ValidationError("sweep config needs 'output_dir', 'trainers' and 'base'");
  }
  const std::string out_dir = j.at("output_dir").get<std::string>();
  const auto trainers = j.at("trainers").get<std::vector<std::string>>();
  if (trainers.empty()) throw ValidationError("sweep: 'trainers' must not be empty");
  for (const auto& t : trainers) trainer_kind_from_string(t);
  const json base = j.at("base");
  parse_experiment_json(base);  // validate the base eagerly
  const json space = j.value("space", json::object());

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_text_file((dir / "sweep_config.json").string(), text);
  const std::string hash = config_fingerprint(text);

  std::ofstream rows((dir / "sweep.csv").string());
  rows << "# config=" << hash << "\n";
  rows << "trial,trainer,covered_modes,mode_count,success,error\n";
  std::ofstream params((dir / "sweep_params.jsonl").string());

  SweepSummary summary;
  summary.output_dir = out_dir;
  std::map<std::string, std::pair<int, int>> tally;  // trainer -> (successes, trials)

  for (int t = 0; t < trials; ++t) {
    Rng rng(seed * 1000003 + static_cast<unsigned long>(t));
    json merged = base;
    json sampled = json::object();
    for (const auto& item : space.items()) {
      const json value = sample_space_value(item.value(), item.key(), rng);
      sampled[item.key()] = value;
      assign_config_path(merged, item.key(), value);
    }
    merged["seed"] = seed * 92821 + static_cast<unsigned long>(t);
    params << json{{"trial", t}, {"sampled", sampled}, {"seed", merged["seed"]}}.dump() << "\n";

    for (const std::string& trainer : trainers) {
      merged["trainer"] = trainer;
      SweepTrialResult result;
      result.trial = t;
      result.trainer = trainer;
      try {
        const ExperimentConfig cfg = parse_experiment_json(merged);
        const BuiltExperiment built = build_experiment(cfg);
        const TrainLog log = train(built.train, built.dataset);
        result.mode_count = built.data_spec.mode_count;
        if (!log.samples.empty()) {
          const CoverageReport coverage =
              mode_coverage(log.samples.back().samples, built.data_spec);
          result.covered_modes = static_cast<int>(coverage.covered_modes.size());
          result.success = coverage.all_covered(built.data_spec.mode_count);
        }
      } catch (const std::exception& e) {
        result.error = e.what();
      }
      rows << result.trial << "," << result.trainer << "," << result.covered_modes << ","
           << result.mode_count << "," << (result.success ? 1 : 0) << ",\""
           << result.error << "\"\n";
      rows.flush();
      auto& [wins, total] = tally[trainer];
      total += 1;
      if (result.success) wins += 1;
      summary.trials.push_back(std::move(result));
    }
  }

  json sj;
  sj["config_hash"] = hash;
  sj["trials"] = trials;
  sj["seed"] = seed;
  for (const auto& [trainer, wt] : tally) {
    const double rate = wt.second > 0 ? static_cast<double>(wt.first) / wt.second : 0.0;
    summary.success_rates.emplace_back(trainer, rate);
    sj["success_rates"][trainer] = rate;
  }
  write_text_file((dir / "summary.json").string(), sj.dump(2) + "\n");
  return summary;
}

namespace {

char fail_or_ok(bool ok, int& failures) {
  if (!ok) ++failures;
  return ok ? ' ' : '!';
}

}  // namespace

DualityCheckResult check_duality(int trials, unsigned long seed) {
  if (trials < 1) throw ValidationError("check_duality: trials must be >= 1");
  DualityCheckResult result;
  char buf[256];

  const auto add_line = [&](const std::string& s) { result.lines.push_back(s); };

  // showcase: symmetric single-example instance, recovered weights vanish
  {
    Matrix x(1, 3), g(1, 3);
    x << 0.4, -1.2, 0.7;
    g = x;
    const LinearBatch batch = make_linear_batch(x, g, 1.0);
    const LinearDualSolution sol = solve_dual_linear(batch, 1e-10, 20000);
    const Vector w = recover_weights(sol.lambda, batch);
    std::snprintf(buf, sizeof buf, "degenerate n=1 matched pair: |w*| = %.3e (expected ~0)",
                  w.norm());
    add_line(buf);
    result.instances += 1;
    if (w.norm() > 1e-8) result.failures += 1;
  }

  Rng rng(seed * 7919 + 17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int claim1_n[] = {5, 10, 20};
  const int claim1_d[] = {2, 5, 10};
  const double claim1_C[] = {1e-4, 1e-2, 1.0};

  for (int t = 0; t < trials; ++t) {
    const int n = claim1_n[t % 3];
    const int d = claim1_d[(t / 3) % 3];
    const double C = claim1_C[(t / 9) % 3];
    Matrix X(n, d), G(n, d);
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < d; ++jj) {
        X(i, jj) = gauss(rng);
        G(i, jj) = gauss(rng);
      }
    const LinearBatch batch = make_linear_batch(X, G, C);
    const LinearDualSolution sol = solve_dual_linear(batch, 1e-9, 50000);
    const Vector w_dual = recover_weights(sol.lambda, batch);

    const DescentResult primal = reference_descent(
        [&](const Vector& w, Vector& grad) {
          grad = primal_gradient_linear(w, batch);
          return primal_objective_linear(w, batch);
        },
        Vector::Zero(d), 1e-10, 500000);

    const double gap = std::abs(primal.value - sol.value);
    const double gap_tol = 1e-6 * (1.0 + std::abs(primal.value));
    const double wdiff = (w_dual - primal.x).lpNorm<Eigen::Infinity>();
    int fails = 0;
    fail_or_ok(gap <= gap_tol, fails);
    fail_or_ok(wdiff <= 1e-4, fails);
    fail_or_ok(primal.converged, fails);
    std::snprintf(buf, sizeof buf,
                  "linear dual [%2d] n=%2d d=%2d C=%g: gap=%.3e (tol %.1e) wdiff=%.3e %s", t, n,
                  d, C, gap, gap_tol, wdiff, fails == 0 ? "ok" : "FAIL");
    add_line(buf);
    result.instances += 1;
    if (fails > 0) result.failures += 1;
  }

  const double deltas[] = {1e-3, 1.0, 1e3};
  for (int t = 0; t < trials; ++t) {
    const int n = 4 + (t % 7);
    const int h = 4 + (t % 3);
    const double delta = deltas[t % 3];
    const MLPSpec scorer_spec = make_mlp_spec({2, h, 1}, Activation::Tanh);
    ParamVector w_k = random_params(scorer_spec, rng, 0.8);
    const int P = scorer_spec.param_count();
    Matrix X(n, 2), G(n, 2);
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < 2; ++jj) {
        X(i, jj) = gauss(rng);
        G(i, jj) = gauss(rng);
      }

    ScoreLinData data;
    data.scores_x = forward_mlp(scorer_spec, w_k, X).outputs.col(0);
    data.scores_z = forward_mlp(scorer_spec, w_k, G).outputs.col(0);
    data.grads_x = per_sample_score_grads(scorer_spec, w_k, X);
    data.grads_z = per_sample_score_grads(scorer_spec, w_k, G);
    data.w_k = w_k.values;
    data.C = 1e-2;

    const TRDualSolution sol = solve_tr_dual(data, delta, 1e-9, 50000);
    const DescentResult primal = reference_descent_ball(
        [&](const Vector& s, Vector& grad) {
          // gradient of the score-linearized model
          const int nn = data.sample_count();
          const Vector sx = data.scores_x + data.grads_x * s;
          const Vector sz = data.scores_z + data.grads_z * s;
          grad = data.C * (data.w_k + s);
          for (int i = 0; i < nn; ++i) {
            grad -= sigmoid(-sx[i]) / (2.0 * nn) * data.grads_x.row(i).transpose();
            grad += sigmoid(sz[i]) / (2.0 * nn) * data.grads_z.row(i).transpose();
          }
          return model_score_lin(s, data);
        },
        Vector::Zero(P), delta, 1e-11, 500000);

    const double half_sq = 0.5 * sol.step.squaredNorm();
    const double gap = std::abs(sol.model_value - sol.dual_value);
    const double gap_tol = 1e-5 * (1.0 + std::abs(sol.model_value));
    const double ref_gap = std::abs(primal.value - sol.dual_value);
    const double ref_tol = 1e-5 * (1.0 + std::abs(primal.value));
    const double slack = std::abs(sol.lambda.lambda_T * (half_sq - delta));
    int fails = 0;
    fail_or_ok(gap <= gap_tol, fails);
    fail_or_ok(ref_gap <= ref_tol, fails);
    fail_or_ok(half_sq <= delta + 1e-8, fails);
    fail_or_ok(slack <= 1e-6, fails);
    std::snprintf(buf, sizeof buf,
                  "trust-region dual [%2d] n=%d P=%2d delta=%g: gap=%.3e ref_gap=%.3e "
                  "feas=%.3e slack=%.3e %s",
                  t, n, P, delta, gap, ref_gap, std::max(0.0, half_sq - delta), slack,
                  fails == 0 ? "ok" : "FAIL");
    add_line(buf);
    result.instances += 1;
    if (fails > 0) result.failures += 1;
  }

  return result;
}

}  // namespace dualgan
