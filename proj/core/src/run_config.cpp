#include "holo/run_config.hpp"

#include <fstream>
#include <sstream>

#include "config_json.hpp"

namespace holo {

using nlohmann::json;
using cfgjson::read_opt;
using cfgjson::reject_unknown;

TaskKind DataSpec::task() const {
  if (generator == "phase_classification") return TaskKind::kClassification;
  if (generator == "phasor_prediction") return TaskKind::kRegression;
  throw ConfigError("data: unknown generator '" + generator + "'");
}

void DataSpec::validate() const {
  const auto kind = task();
  if (n < 2) throw ConfigError("data: n must be >= 2");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("data: test_fraction must be in (0, 1)");
  }
  if (dim < 1) throw ConfigError("data: dim must be >= 1");
  if (kind == TaskKind::kClassification) {
    if (num_classes < 2) throw ConfigError("data: num_classes must be >= 2");
    if (seq_len < 1) throw ConfigError("data: seq_len must be >= 1");
    if (!(phase.phase_noise >= 0.0) || !(phase.doppler >= 0.0)) {
      throw ConfigError("data: phase_noise and doppler must be >= 0");
    }
  } else {
    if (phasor.t_in < 1 || phasor.t_out < 1 || phasor.n_phasors < 1) {
      throw ConfigError("data: t_in, t_out and n_phasors must be >= 1");
    }
  }
}

void RunConfig::validate() const {
  data.validate();
  model.validate();
  optim.schedule.validate();
  if (model.task != data.task()) throw ConfigError("model task does not match data generator");
  const bool cls = data.task() == TaskKind::kClassification;
  const auto t = cls ? data.seq_len : data.phasor.t_in;
  if (model.seq_len != t || model.d_in != data.dim) {
    throw ConfigError("model input shape " + shape_str(model.seq_len, model.d_in) +
                      " does not match data " + shape_str(t, data.dim));
  }
  if (cls && model.num_classes != data.num_classes) {
    throw ConfigError("model.num_classes does not match data.num_classes");
  }
  if (!cls && (model.horizon != data.phasor.t_out || model.d_out != data.dim)) {
    throw ConfigError("model horizon/d_out do not match data t_out/dim");
  }
  if (optim.epochs < 1 || optim.batch_size < 1) {
    throw ConfigError("optim: epochs and batch_size must be >= 1");
  }
  if (!(optim.adam.lr >= 0.0) || !(optim.adam.weight_decay >= 0.0)) {
    throw ConfigError("optim: lr and weight_decay must be >= 0");
  }
  if (!(optim.adam.beta1 >= 0.0 && optim.adam.beta1 < 1.0) ||
      !(optim.adam.beta2 >= 0.0 && optim.adam.beta2 < 1.0) || !(optim.adam.eps > 0.0)) {
    throw ConfigError("optim: betas must be in [0, 1) and eps > 0");
  }
  if (!robustness.grid.empty()) validate_grid(robustness.grid);
  if (gradcheck.seeds < 1 || !(gradcheck.tolerance > 0.0) || !(gradcheck.h > 0.0)) {
    throw ConfigError("gradcheck: seeds >= 1, tolerance > 0 and h > 0 required");
  }
  if (out.empty()) throw ConfigError("out must not be empty");
}

RunConfig default_run_config(TaskKind task) {
  RunConfig c;
  c.optim.adam.lr = 1e-3;
  c.optim.adam.weight_decay = 1e-5;
  c.optim.epochs = 30;
  if (task == TaskKind::kClassification) {
    c.data.generator = "phase_classification";
    c.data.phase.phase_noise = 1.2;
    c.optim.batch_size = 16;
    c.optim.schedule.kind = ScheduleKind::kStep;
    c.optim.schedule.step_size = 5;
    c.optim.schedule.gamma = 0.8;
  } else {
    c.data.generator = "phasor_prediction";
    c.data.n = 2000;
    c.data.dim = 1;
    c.optim.batch_size = 8;
    c.optim.schedule.kind = ScheduleKind::kPlateau;
    c.optim.schedule.patience = 5;
    c.optim.schedule.factor = 0.5;
  }
  // Model shape follows the data block.
  c.model.task = task;
  if (task == TaskKind::kClassification) {
    c.model.seq_len = c.data.seq_len;
    c.model.d_in = c.data.dim;
    c.model.num_classes = c.data.num_classes;
  } else {
    c.model.seq_len = c.data.phasor.t_in;
    c.model.d_in = c.data.dim;
    c.model.horizon = c.data.phasor.t_out;
    c.model.d_out = c.data.dim;
  }
  return c;
}

namespace {

void parse_data(const json& j, DataSpec& d) {
  const std::string w = "data";
  reject_unknown(j, {"generator", "n", "seq_len", "dim", "num_classes", "phase_noise", "doppler",
                     "t_in", "t_out", "n_phasors", "doppler_range", "speed_kmh", "test_fraction",
                     "seed"},
                 w);
  read_opt(j, "generator", d.generator, w);
  read_opt(j, "n", d.n, w);
  read_opt(j, "seq_len", d.seq_len, w);
  read_opt(j, "dim", d.dim, w);
  read_opt(j, "num_classes", d.num_classes, w);
  read_opt(j, "phase_noise", d.phase.phase_noise, w);
  read_opt(j, "doppler", d.phase.doppler, w);
  read_opt(j, "t_in", d.phasor.t_in, w);
  read_opt(j, "t_out", d.phasor.t_out, w);
  read_opt(j, "n_phasors", d.phasor.n_phasors, w);
  read_opt(j, "doppler_range", d.phasor.doppler_range, w);
  read_opt(j, "speed_kmh", d.phasor.speed_kmh, w);
  read_opt(j, "test_fraction", d.test_fraction, w);
  read_opt(j, "seed", d.seed, w);
  d.phasor.dim = d.dim;
  (void)d.task();
}

void parse_optim(const json& j, TrainOptions& o) {
  const std::string w = "optim";
  reject_unknown(j, {"lr", "beta1", "beta2", "eps", "weight_decay", "epochs", "batch_size",
                     "monitor_samples", "schedule"},
                 w);
  read_opt(j, "lr", o.adam.lr, w);
  read_opt(j, "beta1", o.adam.beta1, w);
  read_opt(j, "beta2", o.adam.beta2, w);
  read_opt(j, "eps", o.adam.eps, w);
  read_opt(j, "weight_decay", o.adam.weight_decay, w);
  read_opt(j, "epochs", o.epochs, w);
  read_opt(j, "batch_size", o.batch_size, w);
  read_opt(j, "monitor_samples", o.monitor_samples, w);
  if (auto it = j.find("schedule"); it != j.end()) {
    const std::string ws = "optim.schedule";
    reject_unknown(*it, {"kind", "step_size", "gamma", "patience", "factor", "min_lr"}, ws);
    std::string kind;
    read_opt(*it, "kind", kind, ws);
    if (!kind.empty()) o.schedule.kind = schedule_kind_from_string(kind);
    read_opt(*it, "step_size", o.schedule.step_size, ws);
    read_opt(*it, "gamma", o.schedule.gamma, ws);
    read_opt(*it, "patience", o.schedule.patience, ws);
    read_opt(*it, "factor", o.schedule.factor, ws);
    read_opt(*it, "min_lr", o.schedule.min_lr, ws);
  }
}

}  // namespace

RunConfig run_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  reject_unknown(j, {"seed", "out", "model", "data", "optim", "robustness", "gradcheck", "verify"},
                 "config");

  DataSpec data;
  if (auto it = j.find("data"); it != j.end()) parse_data(*it, data);
  RunConfig c = default_run_config(data.task());
  const DataSpec defaults = c.data;
  c.data = data;
  // Task-specific data defaults apply where the file is silent.
  if (data.task() == TaskKind::kClassification) {
    if (!j.contains("data") || !j["data"].contains("phase_noise")) {
      c.data.phase.phase_noise = defaults.phase.phase_noise;
    }
  } else {
    if (!j.contains("data") || !j["data"].contains("n")) c.data.n = defaults.n;
    if (!j.contains("data") || !j["data"].contains("dim")) c.data.dim = defaults.dim;
    c.data.phasor.dim = c.data.dim;
  }

  read_opt(j, "seed", c.seed, "config");
  std::string out;
  read_opt(j, "out", out, "config");
  if (!out.empty()) c.out = out;

  ModelConfig base = c.model;
  const bool cls = c.data.task() == TaskKind::kClassification;
  base.task = c.data.task();
  base.seq_len = cls ? c.data.seq_len : c.data.phasor.t_in;
  base.d_in = c.data.dim;
  base.num_classes = c.data.num_classes;
  if (!cls) {
    base.horizon = c.data.phasor.t_out;
    base.d_out = c.data.dim;
  }
  c.model = j.contains("model") ? cfgjson::model_from_json(j["model"], base) : base;

  if (auto it = j.find("optim"); it != j.end()) parse_optim(*it, c.optim);
  if (auto it = j.find("robustness"); it != j.end()) {
    const std::string w = "robustness";
    reject_unknown(*it, {"axis", "grid", "seed"}, w);
    std::string axis;
    read_opt(*it, "axis", axis, w);
    if (!axis.empty()) c.robustness.axis = noise_axis_from_string(axis);
    read_opt(*it, "grid", c.robustness.grid, w);
    read_opt(*it, "seed", c.robustness.seed, w);
  }
  if (auto it = j.find("gradcheck"); it != j.end()) {
    const std::string w = "gradcheck";
    reject_unknown(*it, {"seeds", "tolerance", "h"}, w);
    read_opt(*it, "seeds", c.gradcheck.seeds, w);
    read_opt(*it, "tolerance", c.gradcheck.tolerance, w);
    read_opt(*it, "h", c.gradcheck.h, w);
  }
  if (auto it = j.find("verify"); it != j.end()) {
    reject_unknown(*it, {"seed"}, "verify");
    read_opt(*it, "seed", c.verify_seed, "verify");
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return run_config_from_json(ss.str());
}

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["out"] = c.out.string();
  j["model"] = cfgjson::model_to_json(c.model);
  json d;
  d["generator"] = c.data.generator;
  d["n"] = c.data.n;
  d["dim"] = c.data.dim;
  d["test_fraction"] = c.data.test_fraction;
  d["seed"] = c.data.seed;
  if (c.data.task() == TaskKind::kClassification) {
    d["seq_len"] = c.data.seq_len;
    d["num_classes"] = c.data.num_classes;
    d["phase_noise"] = c.data.phase.phase_noise;
    d["doppler"] = c.data.phase.doppler;
  } else {
    d["t_in"] = c.data.phasor.t_in;
    d["t_out"] = c.data.phasor.t_out;
    d["n_phasors"] = c.data.phasor.n_phasors;
    d["doppler_range"] = c.data.phasor.doppler_range;
    d["speed_kmh"] = c.data.phasor.speed_kmh;
  }
  j["data"] = d;
  json o;
  o["lr"] = c.optim.adam.lr;
  o["beta1"] = c.optim.adam.beta1;
  o["beta2"] = c.optim.adam.beta2;
  o["eps"] = c.optim.adam.eps;
  o["weight_decay"] = c.optim.adam.weight_decay;
  o["epochs"] = c.optim.epochs;
  o["batch_size"] = c.optim.batch_size;
  o["monitor_samples"] = c.optim.monitor_samples;
  o["schedule"] = {{"kind", to_string(c.optim.schedule.kind)},
                   {"step_size", c.optim.schedule.step_size},
                   {"gamma", c.optim.schedule.gamma},
                   {"patience", c.optim.schedule.patience},
                   {"factor", c.optim.schedule.factor},
                   {"min_lr", c.optim.schedule.min_lr}};
  j["optim"] = o;
  j["robustness"] = {{"axis", to_string(c.robustness.axis)},
                     {"grid", c.robustness.grid.empty() ? default_grid(c.robustness.axis)
                                                        : c.robustness.grid},
                     {"seed", c.robustness.seed}};
  j["gradcheck"] = {{"seeds", c.gradcheck.seeds},
                    {"tolerance", c.gradcheck.tolerance},
                    {"h", c.gradcheck.h}};
  j["verify"] = {{"seed", c.verify_seed}};
  return j.dump(2) + "\n";
}

Dataset make_dataset(const DataSpec& spec) {
  spec.validate();
  if (spec.task() == TaskKind::kClassification) {
    return gen_phase_classification(spec.n, spec.seq_len, spec.dim, spec.num_classes, spec.seed,
                                    spec.phase);
  }
  auto opts = spec.phasor;
  opts.dim = spec.dim;
  return gen_phasor_prediction(spec.n, opts, spec.seed);
}

}  // namespace holo
