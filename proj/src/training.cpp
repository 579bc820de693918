#include "dualgan/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "dualgan/dual_linear.hpp"
#include "dualgan/errors.hpp"
#include "dualgan/trust_region.hpp"

namespace dualgan {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// independent rng streams so the consumers cannot perturb each other
Rng stream(unsigned long seed, unsigned long which) { return Rng(seed * 8 + which); }
constexpr unsigned long kInitStream = 0;
constexpr unsigned long kBatchStream = 1;
constexpr unsigned long kNoiseStream = 2;
constexpr unsigned long kDumpStream = 3;
constexpr unsigned long kCheckStream = 4;

class IterTimer {
 public:
  explicit IterTimer(bool enabled) : enabled_(enabled) {
    if (enabled_) start_ = std::chrono::steady_clock::now();
  }
  double elapsed_ms() const {
    if (!enabled_) return 0.0;
    const auto now = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(now - start_).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

Matrix draw_batch(const Matrix& dataset, int batch_size, Rng& rng) {
  if (batch_size == dataset.rows()) return dataset;  // full pass, no rng consumed
  std::uniform_int_distribution<int> pick(0, static_cast<int>(dataset.rows()) - 1);
  Matrix batch(batch_size, dataset.cols());
  for (int i = 0; i < batch_size; ++i) batch.row(i) = dataset.row(pick(rng));
  return batch;
}

double quantile(Vector values, double q) {
  if (values.size() == 0) return kNan;
  std::sort(values.data(), values.data() + values.size());
  const double pos = q * (values.size() - 1);
  const int lo = static_cast<int>(std::floor(pos));
  const int hi = static_cast<int>(std::ceil(pos));
  const double frac = pos - lo;
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

struct LambdaStats {
  double median = kNan, p10 = kNan, p90 = kNan;
  Vector rescaled;
};

LambdaStats lambda_stats(const Vector& lambda_x, const Vector& lambda_z, int n) {
  LambdaStats s;
  s.rescaled.resize(2 * n);
  s.rescaled.head(n) = 2.0 * n * lambda_x;
  s.rescaled.tail(n) = 2.0 * n * lambda_z;
  s.median = quantile(s.rescaled, 0.5);
  s.p10 = quantile(s.rescaled, 0.1);
  s.p90 = quantile(s.rescaled, 0.9);
  return s;
}

double disc_accuracy(const Vector& scores_x, const Vector& scores_z) {
  const int n = static_cast<int>(scores_x.size());
  int correct = 0;
  for (int i = 0; i < n; ++i) {
    if (scores_x[i] > 0.0) ++correct;
    if (scores_z[i] < 0.0) ++correct;
  }
  return static_cast<double>(correct) / (2.0 * n);
}

void emit(TrainLog& log, const TrainHooks& hooks, const TrainRecord& rec) {
  log.records.push_back(rec);
  if (hooks.on_record) hooks.on_record(rec);
}

void emit_lambdas(TrainLog& log, const TrainHooks& hooks, int iter, const Vector& rescaled) {
  log.lambda_snapshots.push_back(rescaled);
  if (hooks.on_lambdas) hooks.on_lambdas(iter, rescaled);
}

void dump_samples(TrainLog& log, const TrainHooks& hooks, const TrainConfig& config,
                  const ParamVector& theta, const Matrix& dump_noise, int iter) {
  SampleDump dump;
  dump.iter = iter;
  dump.samples = forward_mlp(config.generator, theta, dump_noise).outputs;
  if (hooks.on_samples) hooks.on_samples(dump);
  log.samples.push_back(std::move(dump));
}

bool should_dump(const TrainConfig& config, int iter) {
  return config.sample_every > 0 && iter % config.sample_every == 0;
}

void check_weak_duality(const TrainConfig& config, const LinearBatch& batch, double dual_value,
                        Rng& rng) {
  if (!config.check_weak_duality) return;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    Vector w(batch.feature_dim());
    for (int i = 0; i < w.size(); ++i) w[i] = gauss(rng);
    const double primal = primal_objective_linear(w, batch);
    if (dual_value > primal + 1e-9) {
      throw NumericalError("weak duality violated: dual " + std::to_string(dual_value) +
                           " exceeds primal " + std::to_string(primal));
    }
  }
}

// generator ascent direction of the adversarial objective through the scorer
Vector generator_objective_gradient(const Scorer& scorer, const Vector& w, const Tape& gen_tape,
                                    const Matrix& gen_out) {
  const int n = static_cast<int>(gen_out.rows());
  ScoreResult sz = score(scorer, w, gen_out);
  Vector adj(n);
  for (int i = 0; i < n; ++i) adj[i] = sigmoid(sz.scores[i]) / (2.0 * n);
  const Matrix d_gen = score_grad_x(scorer, sz.tape, adj);
  return grad_params(gen_tape, d_gen).values;
}

Scorer scorer_from_config(const TrainConfig& config, int data_dim) {
  if (config.disc_net.has_value()) return Scorer::mlp(*config.disc_net);
  return Scorer::linear(config.features, data_dim);
}

}  // namespace

std::string to_string(TrainerKind k) {
  switch (k) {
    case TrainerKind::Standard:
      return "standard";
    case TrainerKind::DualLinear:
      return "dual_linear";
    case TrainerKind::TrCostLin:
      return "tr_cost_lin";
    case TrainerKind::TrScoreLin:
      return "tr_score_lin";
  }
  return "?";
}

TrainerKind trainer_kind_from_string(const std::string& s) {
  if (s == "standard") return TrainerKind::Standard;
  if (s == "dual_linear") return TrainerKind::DualLinear;
  if (s == "tr_cost_lin") return TrainerKind::TrCostLin;
  if (s == "tr_score_lin") return TrainerKind::TrScoreLin;
  throw ValidationError("unknown trainer '" + s + "'");
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ValidationError("TrainConfig: batch_size must be >= 1");
  if (iterations < 0) throw ValidationError("TrainConfig: iterations must be >= 0");
  generator.validate();
  noise.validate();
  if (generator.input_dim() != noise.dimension) {
    throw ValidationError("TrainConfig: generator input must match noise dimension");
  }
  if (!(gen_adam.lr > 0.0)) throw ValidationError("TrainConfig: gen_lr must be positive");
  if (!(disc_adam.lr > 0.0)) throw ValidationError("TrainConfig: disc_lr must be positive");
  if (!(C > 0.0)) throw ValidationError("TrainConfig: C must be positive");
  if (!(delta.value > 0.0)) throw ValidationError("TrainConfig: delta must be positive");
  if (generator_steps_per_iter < 1) {
    throw ValidationError("TrainConfig: generator_steps_per_iter must be >= 1");
  }
  if (line_search && kind != TrainerKind::DualLinear) {
    throw ValidationError("TrainConfig: line_search is only valid for dual_linear");
  }
  if (disc_net.has_value()) {
    disc_net->validate();
    if (disc_net->output_dim() != 1) {
      throw ValidationError("TrainConfig: discriminator network must output one score");
    }
  }
  if (sample_count < 1) throw ValidationError("TrainConfig: sample_count must be >= 1");
  if (!(dual_tol > 0.0)) throw ValidationError("TrainConfig: dual_tol must be positive");
}

AdamState make_adam_state(int dim) {
  AdamState s;
  s.first_moment = Vector::Zero(dim);
  s.second_moment = Vector::Zero(dim);
  return s;
}

void adam_step(Vector& params, const Vector& grad, AdamState& state, const AdamConfig& cfg) {
  if (grad.size() != params.size() || state.first_moment.size() != params.size()) {
    throw ValidationError("adam_step: shape mismatch");
  }
  state.step_count += 1;
  state.first_moment = cfg.beta1 * state.first_moment + (1.0 - cfg.beta1) * grad;
  state.second_moment =
      cfg.beta2 * state.second_moment + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step_count));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step_count));
  const Vector mhat = state.first_moment / c1;
  const Vector vhat = state.second_moment / c2;
  params -= cfg.lr * (mhat.array() / (vhat.array().sqrt() + cfg.eps)).matrix();
}

double gan_objective(const Vector& scores_x, const Vector& scores_z) {
  const int n = static_cast<int>(scores_x.size());
  if (scores_z.size() != n) throw ValidationError("gan_objective: score vectors differ in size");
  double f = 0.0;
  for (int i = 0; i < n; ++i) {
    f += (softplus(-scores_x[i]) + softplus(scores_z[i])) / (2.0 * n);
  }
  return f;
}

TrainLog train_dual_linear_fullbatch(const TrainConfig& config, const Matrix& dataset,
                                     const TrainHooks& hooks) {
  config.validate();
  if (config.kind != TrainerKind::DualLinear || !config.line_search) {
    throw ValidationError("train_dual_linear_fullbatch: needs dual_linear with line_search");
  }
  const int n = static_cast<int>(dataset.rows());

  Rng rng_init = stream(config.seed, kInitStream);
  Rng rng_noise = stream(config.seed, kNoiseStream);
  Rng rng_dump = stream(config.seed, kDumpStream);
  Rng rng_check = stream(config.seed, kCheckStream);

  ParamVector theta = random_params(config.generator, rng_init);
  const Matrix noise = sample_noise(config.noise, n, rng_noise);
  const Matrix dump_noise = sample_noise(config.noise, config.sample_count, rng_dump);
  const Matrix data_feats = feature_forward(config.features, dataset).feats;

  auto batch_at = [&](const Vector& theta_values, bool with_link) {
    ForwardResult gen =
        forward_mlp(config.generator, params_from_values(config.generator, theta_values), noise);
    FeatureForward ff = feature_forward(config.features, gen.outputs);
    LinearBatch batch;
    batch.data_feats = data_feats;
    batch.gen_feats = std::move(ff.feats);
    batch.C = config.C;
    if (with_link) {
      auto link = std::make_shared<GeneratorLink>();
      link->gen_tape = std::move(gen.tape);
      link->features = config.features;
      link->feat_tape = std::move(ff.tape);
      batch.link = std::move(link);
    }
    return batch;
  };

  TrainLog log;
  double prev_step = 1.0;
  for (int t = 0; t < config.iterations; ++t) {
    IterTimer timer(config.record_wall_time);

    LinearBatch batch = batch_at(theta.values, true);
    LinearDualSolution sol = solve_dual_linear(batch, config.dual_tol, config.dual_max_iter);
    if (!sol.report.converged) {
      log.warnings.push_back("iteration " + std::to_string(t) + ": dual solve stopped at " +
                             std::to_string(sol.report.final_grad_norm));
    }
    check_weak_duality(config, batch, sol.value, rng_check);

    const Vector w = recover_weights(sol.lambda, batch);
    const Vector sx = batch.data_feats * w;
    const Vector sz = batch.gen_feats * w;
    const LambdaStats stats = lambda_stats(sol.lambda.lambda_x, sol.lambda.lambda_z, n);

    const ParamVector grad_theta = generator_gradient_from_dual(sol.lambda, batch);
    auto objective = [&](const Vector& theta_values) {
      return solve_dual_linear(batch_at(theta_values, false), config.dual_tol,
                               config.dual_max_iter)
          .value;
    };
    const double step = backtracking_linesearch(objective, theta.values, grad_theta.values,
                                                std::min(prev_step * 2.0, 1e6));
    if (step > 0.0) {
      theta.values += step * grad_theta.values;
      prev_step = step;
    } else {
      prev_step = std::max(prev_step * 0.5, 1e-12);
    }

    TrainRecord rec;
    rec.iter = t;
    rec.f_primal = primal_objective_linear(w, batch);
    rec.g_dual_or_model = sol.value;
    rec.disc_acc = disc_accuracy(sx, sz);
    rec.lambda_median = stats.median;
    rec.lambda_p10 = stats.p10;
    rec.lambda_p90 = stats.p90;
    rec.delta = kNan;
    rec.rho = kNan;
    rec.wall_ms = timer.elapsed_ms();
    emit(log, hooks, rec);
    emit_lambdas(log, hooks, t, stats.rescaled);
    if (should_dump(config, t)) dump_samples(log, hooks, config, theta, dump_noise, t);
  }

  if (config.iterations > 0) {
    dump_samples(log, hooks, config, theta, dump_noise, config.iterations);
  }
  log.final_generator = theta;
  return log;
}

TrainLog train_dual_linear_minibatch(const TrainConfig& config, const Matrix& dataset,
                                     const TrainHooks& hooks) {
  config.validate();
  if (config.kind != TrainerKind::DualLinear || config.line_search) {
    throw ValidationError("train_dual_linear_minibatch: needs dual_linear without line_search");
  }
  const int n = config.batch_size;

  Rng rng_init = stream(config.seed, kInitStream);
  Rng rng_batch = stream(config.seed, kBatchStream);
  Rng rng_noise = stream(config.seed, kNoiseStream);
  Rng rng_dump = stream(config.seed, kDumpStream);
  Rng rng_check = stream(config.seed, kCheckStream);

  ParamVector theta = random_params(config.generator, rng_init);
  AdamState adam = make_adam_state(theta.size());
  const Matrix dump_noise = sample_noise(config.noise, config.sample_count, rng_dump);
  Matrix fixed_noise;
  if (config.fixed_noise) fixed_noise = sample_noise(config.noise, n, rng_noise);

  TrainLog log;
  for (int t = 0; t < config.iterations; ++t) {
    IterTimer timer(config.record_wall_time);

    const Matrix data_x = draw_batch(dataset, n, rng_batch);
    const Matrix noise =
        config.fixed_noise ? fixed_noise : sample_noise(config.noise, n, rng_noise);
    LinearBatch batch =
        make_linear_batch(data_x, config.generator, theta, noise, config.features, config.C);

    LinearDualSolution sol = solve_dual_linear(batch, config.dual_tol, config.dual_max_iter);
    if (!sol.report.converged) {
      log.warnings.push_back("iteration " + std::to_string(t) + ": dual solve stopped at " +
                             std::to_string(sol.report.final_grad_norm));
    }
    check_weak_duality(config, batch, sol.value, rng_check);

    const Vector w = recover_weights(sol.lambda, batch);
    const LambdaStats stats = lambda_stats(sol.lambda.lambda_x, sol.lambda.lambda_z, n);

    TrainRecord rec;
    rec.iter = t;
    rec.f_primal = primal_objective_linear(w, batch);
    rec.g_dual_or_model = sol.value;
    rec.disc_acc = disc_accuracy(batch.data_feats * w, batch.gen_feats * w);
    rec.lambda_median = stats.median;
    rec.lambda_p10 = stats.p10;
    rec.lambda_p90 = stats.p90;
    rec.delta = kNan;
    rec.rho = kNan;
    rec.wall_ms = timer.elapsed_ms();
    emit(log, hooks, rec);
    emit_lambdas(log, hooks, t, stats.rescaled);

    const ParamVector grad_theta = generator_gradient_from_dual(sol.lambda, batch);
    adam_step(theta.values, -grad_theta.values, adam, config.gen_adam);

    if (should_dump(config, t)) dump_samples(log, hooks, config, theta, dump_noise, t);
  }

  if (config.iterations > 0) {
    dump_samples(log, hooks, config, theta, dump_noise, config.iterations);
  }
  log.final_generator = theta;
  return log;
}

TrainLog train_standard_gan(const TrainConfig& config, const Matrix& dataset,
                            const TrainHooks& hooks) {
  config.validate();
  if (config.kind != TrainerKind::Standard) {
    throw ValidationError("train_standard_gan: config.kind must be standard");
  }
  const int n = config.batch_size;
  const Scorer scorer = scorer_from_config(config, static_cast<int>(dataset.cols()));

  Rng rng_init = stream(config.seed, kInitStream);
  Rng rng_batch = stream(config.seed, kBatchStream);
  Rng rng_noise = stream(config.seed, kNoiseStream);
  Rng rng_dump = stream(config.seed, kDumpStream);

  ParamVector theta = random_params(config.generator, rng_init);
  Vector w = init_scorer_params(scorer, rng_init);
  AdamState adam_gen = make_adam_state(theta.size());
  AdamState adam_disc = make_adam_state(static_cast<int>(w.size()));
  const Matrix dump_noise = sample_noise(config.noise, config.sample_count, rng_dump);
  Matrix fixed_noise;
  if (config.fixed_noise) fixed_noise = sample_noise(config.noise, n, rng_noise);

  TrainLog log;
  for (int t = 0; t < config.iterations; ++t) {
    IterTimer timer(config.record_wall_time);

    const Matrix data_x = draw_batch(dataset, n, rng_batch);
    const Matrix noise =
        config.fixed_noise ? fixed_noise : sample_noise(config.noise, n, rng_noise);
    ForwardResult gen = forward_mlp(config.generator, theta, noise);

    ScoreResult sx = score(scorer, w, data_x);
    ScoreResult sz = score(scorer, w, gen.outputs);

    TrainRecord rec;
    rec.iter = t;
    rec.f_primal = gan_objective(sx.scores, sz.scores);
    rec.g_dual_or_model = kNan;
    rec.disc_acc = disc_accuracy(sx.scores, sz.scores);
    rec.lambda_median = kNan;
    rec.lambda_p10 = kNan;
    rec.lambda_p90 = kNan;
    rec.delta = kNan;
    rec.rho = kNan;

    // discriminator descent on Eq. (1)
    Vector adj_x(n), adj_z(n);
    for (int i = 0; i < n; ++i) {
      adj_x[i] = -sigmoid(-sx.scores[i]) / (2.0 * n);
      adj_z[i] = sigmoid(sz.scores[i]) / (2.0 * n);
    }
    const Vector grad_w =
        score_grad_w(scorer, sx.tape, adj_x) + score_grad_w(scorer, sz.tape, adj_z);
    adam_step(w, grad_w, adam_disc, config.disc_adam);

    // generator ascent at the updated discriminator
    const Vector grad_theta = generator_objective_gradient(scorer, w, gen.tape, gen.outputs);
    adam_step(theta.values, -grad_theta, adam_gen, config.gen_adam);

    rec.wall_ms = timer.elapsed_ms();
    emit(log, hooks, rec);
    if (should_dump(config, t)) dump_samples(log, hooks, config, theta, dump_noise, t);
  }

  if (config.iterations > 0) {
    dump_samples(log, hooks, config, theta, dump_noise, config.iterations);
  }
  log.final_generator = theta;
  return log;
}

TrainLog train_trust_region(const TrainConfig& config, const Matrix& dataset,
                            const TrainHooks& hooks) {
  config.validate();
  if (config.kind != TrainerKind::TrCostLin && config.kind != TrainerKind::TrScoreLin) {
    throw ValidationError("train_trust_region: config.kind must be tr_cost_lin or tr_score_lin");
  }
  const bool score_lin = config.kind == TrainerKind::TrScoreLin;
  const int n = config.batch_size;
  const Scorer scorer = scorer_from_config(config, static_cast<int>(dataset.cols()));

  Rng rng_init = stream(config.seed, kInitStream);
  Rng rng_batch = stream(config.seed, kBatchStream);
  Rng rng_noise = stream(config.seed, kNoiseStream);
  Rng rng_dump = stream(config.seed, kDumpStream);

  ParamVector theta = random_params(config.generator, rng_init);
  Vector w = init_scorer_params(scorer, rng_init);
  AdamState adam_gen = make_adam_state(theta.size());
  const Matrix dump_noise = sample_noise(config.noise, config.sample_count, rng_dump);
  Matrix fixed_noise;
  if (config.fixed_noise) fixed_noise = sample_noise(config.noise, n, rng_noise);

  TrustRegionState state;
  state.delta = config.delta.value;

  // regularized discriminator objective the models approximate
  auto f_reg = [&](const Vector& w_at, const Matrix& data_x, const Matrix& gen_out) {
    const Vector fx = score(scorer, w_at, data_x).scores;
    const Vector fz = score(scorer, w_at, gen_out).scores;
    return gan_objective(fx, fz) + 0.5 * config.C * w_at.squaredNorm();
  };

  TrainLog log;
  for (int t = 0; t < config.iterations; ++t) {
    IterTimer timer(config.record_wall_time);

    const Matrix data_x = draw_batch(dataset, n, rng_batch);
    const Matrix noise =
        config.fixed_noise ? fixed_noise : sample_noise(config.noise, n, rng_noise);

    ScoreResult sx_entry = score(scorer, w, data_x);
    ScoreResult sz_entry =
        score(scorer, w, forward_mlp(config.generator, theta, noise).outputs);

    TrainRecord rec;
    rec.iter = t;
    rec.f_primal = gan_objective(sx_entry.scores, sz_entry.scores);
    rec.disc_acc = disc_accuracy(sx_entry.scores, sz_entry.scores);
    rec.g_dual_or_model = kNan;
    rec.lambda_median = kNan;
    rec.lambda_p10 = kNan;
    rec.lambda_p90 = kNan;
    rec.rho = kNan;

    // 1. generator ascent steps on f(theta, w_k)
    for (int step_i = 0; step_i < config.generator_steps_per_iter; ++step_i) {
      ForwardResult gen = forward_mlp(config.generator, theta, noise);
      const Vector grad_theta = generator_objective_gradient(scorer, w, gen.tape, gen.outputs);
      adam_step(theta.values, -grad_theta, adam_gen, config.gen_adam);
    }

    // 2. discriminator step from the model function at the fresh generator
    const Matrix gen_out = forward_mlp(config.generator, theta, noise).outputs;
    ScoreResult sx = score(scorer, w, data_x);
    ScoreResult sz = score(scorer, w, gen_out);
    const double f_old = gan_objective(sx.scores, sz.scores) + 0.5 * config.C * w.squaredNorm();

    bool applied = false;
    for (int attempt = 0; attempt <= state.max_resolves && !applied; ++attempt) {
      Vector s;
      double m_s = kNan;
      bool active = true;
      if (score_lin) {
        ScoreLinData data;
        data.scores_x = sx.scores;
        data.scores_z = sz.scores;
        data.grads_x = score_per_sample_grads(scorer, w, data_x);
        data.grads_z = score_per_sample_grads(scorer, w, gen_out);
        data.w_k = w;
        data.C = config.C;
        TRDualSolution sol = solve_tr_dual(data, state.delta, config.dual_tol,
                                           config.dual_max_iter);
        s = sol.step;
        m_s = sol.model_value;
        active = sol.lambda.lambda_T > 1e-10 ||
                 0.5 * s.squaredNorm() >= state.delta * (1.0 - 1e-6);
        const LambdaStats stats = lambda_stats(sol.lambda.lambda_x, sol.lambda.lambda_z, n);
        rec.lambda_median = stats.median;
        rec.lambda_p10 = stats.p10;
        rec.lambda_p90 = stats.p90;
      } else {
        Vector adj_x(n), adj_z(n);
        for (int i = 0; i < n; ++i) {
          adj_x[i] = -sigmoid(-sx.scores[i]) / (2.0 * n);
          adj_z[i] = sigmoid(sz.scores[i]) / (2.0 * n);
        }
        const Vector grad_w = score_grad_w(scorer, sx.tape, adj_x) +
                              score_grad_w(scorer, sz.tape, adj_z) + config.C * w;
        s = step_cost_lin(grad_w, state.delta);
        m_s = model_cost_lin(s, f_old, grad_w);
        active = s.squaredNorm() > 0.0;
      }

      const double f_new = f_reg(w + s, data_x, gen_out);
      double rho = kNan;
      bool degenerate = false;
      try {
        rho = acceptance_ratio(f_old, f_new, m_s);
      } catch (const DegenerateModel&) {
        degenerate = true;
      }

      if (!config.delta.adaptive) {
        w += s;
        rec.g_dual_or_model = m_s;
        rec.rho = rho;
        applied = true;
        break;
      }
      if (degenerate) {
        state.delta *= state.shrink;
        continue;
      }
      const DeltaUpdate upd = update_delta(state, rho, active);
      state.delta = upd.delta;
      if (upd.accept) {
        w += s;
        rec.g_dual_or_model = m_s;
        rec.rho = rho;
        applied = true;
      }
    }
    if (!applied) {
      log.warnings.push_back("iteration " + std::to_string(t) +
                             ": model stayed inaccurate, accepted zero step");
    }

    rec.delta = state.delta;
    rec.wall_ms = timer.elapsed_ms();
    emit(log, hooks, rec);
    if (should_dump(config, t)) dump_samples(log, hooks, config, theta, dump_noise, t);
  }

  if (config.iterations > 0) {
    dump_samples(log, hooks, config, theta, dump_noise, config.iterations);
  }
  log.final_generator = theta;
  return log;
}

TrainLog train(const TrainConfig& config, const Matrix& dataset, const TrainHooks& hooks) {
  switch (config.kind) {
    case TrainerKind::Standard:
      return train_standard_gan(config, dataset, hooks);
    case TrainerKind::DualLinear:
      return config.line_search ? train_dual_linear_fullbatch(config, dataset, hooks)
                                : train_dual_linear_minibatch(config, dataset, hooks);
    case TrainerKind::TrCostLin:
    case TrainerKind::TrScoreLin:
      return train_trust_region(config, dataset, hooks);
  }
  throw ValidationError("train: unknown trainer kind");
}

}  // namespace dualgan
