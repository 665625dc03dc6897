#include "holo/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

namespace holo {

std::string to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::kNone: return "none";
    case ScheduleKind::kStep: return "step";
    case ScheduleKind::kPlateau: return "plateau";
  }
  return "none";
}

ScheduleKind schedule_kind_from_string(const std::string& s) {
  if (s == "none") return ScheduleKind::kNone;
  if (s == "step") return ScheduleKind::kStep;
  if (s == "plateau") return ScheduleKind::kPlateau;
  throw ConfigError("unknown schedule '" + s + "'");
}

void ScheduleOptions::validate() const {
  if (kind == ScheduleKind::kStep && (step_size == 0 || !(gamma > 0.0))) {
    throw ConfigError("schedule: step needs step_size >= 1 and gamma > 0");
  }
  if (kind == ScheduleKind::kPlateau && !(factor > 0.0 && factor < 1.0)) {
    throw ConfigError("schedule: plateau factor must be in (0, 1)");
  }
}

LrSchedule::LrSchedule(double base_lr, ScheduleOptions opts)
    : opts_(opts), lr_(base_lr), best_(std::numeric_limits<double>::infinity()) {
  opts_.validate();
}

void LrSchedule::epoch_end(double monitored) {
  ++epochs_;
  switch (opts_.kind) {
    case ScheduleKind::kNone:
      break;
    case ScheduleKind::kStep:
      if (epochs_ % opts_.step_size == 0) lr_ *= opts_.gamma;
      break;
    case ScheduleKind::kPlateau:
      if (monitored < best_ * (1.0 - opts_.threshold)) {
        best_ = monitored;
        bad_epochs_ = 0;
      } else if (++bad_epochs_ > opts_.patience) {
        lr_ = std::max(opts_.min_lr, lr_ * opts_.factor);
        bad_epochs_ = 0;
      }
      break;
  }
}

namespace {

const ComplexMatrix* target_of(const Dataset& d, std::size_t i) {
  return d.kind == TaskKind::kRegression ? &d.targets[i] : nullptr;
}

std::size_t label_of(const Dataset& d, std::size_t i) {
  return d.kind == TaskKind::kClassification ? d.labels[i] : 0;
}

void check_compatible(const ModelConfig& cfg, const Dataset& data) {
  if (data.kind != cfg.task) throw DataError("train: dataset task does not match model task");
  if (data.seq_len() != cfg.seq_len || data.dim() != cfg.d_in) {
    throw DataError("train: dataset samples are " + shape_str(data.seq_len(), data.dim()) +
                    ", model expects " + shape_str(cfg.seq_len, cfg.d_in));
  }
  if (cfg.task == TaskKind::kClassification && data.num_classes > cfg.num_classes) {
    throw DataError("train: dataset has more classes than the model");
  }
  if (cfg.task == TaskKind::kRegression &&
      (data.targets.front().rows() != cfg.horizon || data.targets.front().cols() != cfg.d_out)) {
    throw DataError("train: target shape does not match horizon x d_out");
  }
}

}  // namespace

TrainResult train(const ModelConfig& cfg, const Dataset& data, const TrainOptions& opts,
                  ad::ParamStore params) {
  cfg.validate();
  data.validate();
  check_compatible(cfg, data);
  if (opts.batch_size == 0) throw ConfigError("train: batch_size must be >= 1");
  if (!(opts.adam.lr >= 0.0)) throw ConfigError("train: lr must be >= 0");

  TrainResult res;
  LrSchedule sched(opts.adam.lr, opts.schedule);
  std::mt19937_64 dropout_rng(derive_seed(opts.seed, 0xD0D0));
  std::vector<std::size_t> order(data.size());
  std::vector<std::size_t> monitor_idx(
      opts.monitor_samples == 0 ? data.size() : std::min(opts.monitor_samples, data.size()));
  std::iota(monitor_idx.begin(), monitor_idx.end(), std::size_t{0});
  const Dataset monitor = data.subset(monitor_idx);

  for (std::size_t epoch = 1; epoch <= opts.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (opts.shuffle) {
      std::mt19937_64 shuf(derive_seed(opts.seed, epoch));
      std::shuffle(order.begin(), order.end(), shuf);
    }
    ad::AdamOptions adam = opts.adam;
    adam.lr = sched.lr();

    for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
      const auto end = std::min(order.size(), start + opts.batch_size);
      const double inv = 1.0 / static_cast<double>(end - start);
      params.zero_grad();
      for (std::size_t b = start; b < end; ++b) {
        const auto i = order[b];
        ad::Tape tape;
        auto fv = forward(tape, params, data.inputs[i], cfg, {true, &dropout_rng});
        auto lv = sample_loss(tape, fv, data.inputs[i], label_of(data, i), target_of(data, i), cfg);
        if (!std::isfinite(lv.total.scalar())) {
          const auto bad = tape.first_non_finite();
          throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch) +
                                 ", sample " + std::to_string(i) + "; first non-finite tensor: " +
                                 bad.value_or("total"));
        }
        tape.backward(lv.total);
        tape.accumulate_into(params, inv);
      }
      for (const auto& p : params.params()) {
        if (!all_finite(p.grad)) {
          throw TrainingDiverged("non-finite gradient at epoch " + std::to_string(epoch) +
                                 "; first non-finite tensor: " + p.name + ".grad");
        }
      }
      ad::adam_step(params, adam);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = adam.lr;
    rec.loss = total_loss(monitor, params, cfg);
    if (!std::isfinite(rec.loss.total)) {
      throw TrainingDiverged("non-finite epoch loss at epoch " + std::to_string(epoch));
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    sched.epoch_end(rec.loss.total);
    if (opts.on_epoch) opts.on_epoch(rec, params);
    res.history.push_back(rec);
  }
  res.params = std::move(params);
  return res;
}

// ---- gradient check ---------------------------------------------------------------

namespace {

ComplexMatrix random_complex(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  ComplexMatrix m(r, c);
  for (auto& z : m.values()) {
    const double re = nd(rng);
    const double im = nd(rng);
    z = {re, im};
  }
  return m;
}

double frob(const ComplexMatrix& m) {
  double s = 0.0;
  for (const auto& z : m.values()) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace

GradCheckReport grad_check(const ModelConfig& cfg_in, std::uint64_t seed,
                           const GradCheckOptions& opts) {
  ModelConfig cfg = cfg_in;
  cfg.validate();
  GradCheckReport rep;
  rep.seed = seed;

  for (std::size_t attempt = 0; attempt <= opts.max_redraws; ++attempt) {
    std::mt19937_64 rng(derive_seed(seed, attempt));
    auto params = init_params(cfg, rng());
    // Non-trivial norm parameters so their gradients are exercised too.
    for (auto& p : params.params()) {
      if (p.name.find(".ln") != std::string::npos || p.name.ends_with(".b1") ||
          p.name.ends_with(".b2") || p.name == "task.b") {
        p.value = add(p.value, scale(random_complex(p.value.rows(), p.value.cols(), rng), 0.3));
      }
    }
    const auto x = random_complex(cfg.seq_len, cfg.d_in, rng);
    const std::size_t label = cfg.task == TaskKind::kClassification ? rng() % cfg.num_classes : 0;
    const auto target = random_complex(cfg.horizon, cfg.d_out, rng);
    const ComplexMatrix* tgt = cfg.task == TaskKind::kRegression ? &target : nullptr;

    ad::Tape tape;
    auto fv = forward(tape, params, x, cfg);
    auto lv = sample_loss(tape, fv, x, label, tgt, cfg);
    if (tape.min_kink_distance() < opts.kink_margin) {
      ++rep.redraws;
      continue;
    }
    rep.min_kink_distance = tape.min_kink_distance();
    tape.backward(lv.total);
    params.zero_grad();
    tape.accumulate_into(params);

    auto loss_at = [&](const ad::ParamStore& ps) {
      ad::Tape t;
      auto f = forward(t, ps, x, cfg);
      return sample_loss(t, f, x, label, tgt, cfg).total.scalar();
    };
    const auto numeric = ad::finite_diff(loss_at, params, opts.h);

    rep.max_rel_err = 0.0;
    for (std::size_t k = 0; k < params.params().size(); ++k) {
      const auto& p = params.params()[k];
      TensorGradError e;
      e.name = p.name;
      const auto diff = sub(p.grad, numeric[k]);
      e.max_abs_err = max_abs(diff);
      e.rel_err = frob(diff) / std::max({frob(p.grad), frob(numeric[k]), 1e-8});
      rep.max_rel_err = std::max(rep.max_rel_err, e.rel_err);
      rep.tensors.push_back(e);
    }
    rep.pass = rep.max_rel_err <= opts.tolerance;
    return rep;
  }
  throw InternalError("grad_check: every draw landed within the kink margin");
}

}  // namespace holo
