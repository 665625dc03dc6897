#include "holo/experiment.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace holo {

using ojson = nlohmann::ordered_json;

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

namespace {

ojson loss_json(const LossBreakdown& l) {
  return {{"recon", l.recon}, {"task", l.task}, {"phase_reg", l.phase_reg}, {"total", l.total}};
}

ojson ablation_json(const ModelConfig& m) {
  return {{"phase_decay", m.ablate_phase_decay},
          {"coherent_sum", m.ablate_coherent_sum},
          {"reconstruction", m.ablate_reconstruction},
          {"magnitude_only", m.magnitude_only}};
}

}  // namespace

// ---- verify / gradcheck -------------------------------------------------------------

VerifyResult cmd_verify(const RunConfig& cfg) {
  TheoryOptions o;
  o.seed = cfg.verify_seed;
  o.attention = cfg.model.attention();
  VerifyResult r;
  r.reports = run_suite(o);
  r.ok = true;
  std::string all;
  for (const auto& rep : r.reports) {
    r.ok = r.ok && rep.acceptable();
    const auto line = to_json_line(rep);
    all += line + "\n";
    write_text(cfg.out / "verify" / (rep.property + ".json"), line + "\n");
  }
  write_text(cfg.out / "verify.jsonl", all);
  return r;
}

ModelConfig gradcheck_model(const ModelConfig& base, TaskKind task) {
  ModelConfig m = base;
  m.seq_len = 4;
  m.d_in = 2;
  m.d_model = 8;
  m.heads = 2;
  m.layers = 1;
  m.d_ff = 16;
  m.task = task;
  m.num_classes = 3;
  m.horizon = 3;
  m.d_out = 2;
  m.validate();
  return m;
}

std::string to_json_line(const GradCheckReport& r, TaskKind task) {
  ojson j;
  j["task"] = to_string(task);
  j["seed"] = r.seed;
  j["redraws"] = r.redraws;
  j["min_kink_distance"] = r.min_kink_distance;
  j["max_rel_err"] = r.max_rel_err;
  j["pass"] = r.pass;
  ojson ts = ojson::array();
  for (const auto& t : r.tensors) {
    ts.push_back({{"name", t.name}, {"rel_err", t.rel_err}, {"max_abs_err", t.max_abs_err}});
  }
  j["tensors"] = ts;
  return j.dump();
}

GradCheckResult cmd_gradcheck(const RunConfig& cfg) {
  GradCheckOptions go;
  go.h = cfg.gradcheck.h;
  go.tolerance = cfg.gradcheck.tolerance;
  GradCheckResult res;
  res.ok = true;
  std::string all;
  for (const auto task : {TaskKind::kClassification, TaskKind::kRegression}) {
    const auto m = gradcheck_model(cfg.model, task);
    for (std::size_t s = 0; s < cfg.gradcheck.seeds; ++s) {
      auto rep = grad_check(m, derive_seed(cfg.seed, s), go);
      res.max_rel_err = std::max(res.max_rel_err, rep.max_rel_err);
      res.ok = res.ok && rep.pass;
      all += to_json_line(rep, task) + "\n";
      res.reports.emplace_back(task, std::move(rep));
    }
  }
  write_text(cfg.out / "gradcheck.jsonl", all);
  return res;
}

// ---- evaluation ---------------------------------------------------------------------

double EvalMetrics::headline() const {
  return task == TaskKind::kClassification ? classification.accuracy : regression.mae;
}

EvalMetrics evaluate(const Dataset& data, const ad::ParamStore& params, const ModelConfig& cfg) {
  data.validate();
  if (data.kind != cfg.task) throw DataError("eval: dataset task does not match the model");
  if (data.seq_len() != cfg.seq_len || data.dim() != cfg.d_in) {
    throw DataError("eval: dataset samples are " + shape_str(data.seq_len(), data.dim()) +
                    ", model expects " + shape_str(cfg.seq_len, cfg.d_in));
  }
  EvalMetrics m;
  m.task = cfg.task;
  m.n = data.size();
  m.loss = total_loss(data, params, cfg);
  if (cfg.task == TaskKind::kClassification) {
    if (data.num_classes > cfg.num_classes) {
      throw DataError("eval: dataset has more classes than the model");
    }
    std::vector<std::size_t> pred(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) pred[i] = predict(data.inputs[i], params, cfg).label;
    m.classification = classification_metrics(data.labels, pred, cfg.num_classes);
  } else {
    std::vector<ComplexMatrix> pred(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      pred[i] = predict(data.inputs[i], params, cfg).sequence;
    }
    m.regression = regression_metrics(data.targets, pred);
  }
  return m;
}

std::string metrics_json(const EvalMetrics& m, const ModelConfig& cfg, bool pretty) {
  ojson j;
  j["task"] = to_string(m.task);
  j["n"] = m.n;
  if (m.task == TaskKind::kClassification) {
    const auto& c = m.classification;
    j["accuracy"] = c.accuracy;
    j["macro_f1"] = c.macro_f1;
    j["micro_f1"] = c.micro_f1;
    j["per_class_f1"] = c.per_class_f1;
    j["confusion"] = c.confusion;
  } else {
    j["mae"] = m.regression.mae;
    j["rmse"] = m.regression.rmse;
  }
  j["loss"] = loss_json(m.loss);
  j["ablation"] = ablation_json(cfg);
  return (pretty ? j.dump(2) : j.dump()) + "\n";
}

// ---- train / eval -------------------------------------------------------------------

TrainRunResult cmd_train(const RunConfig& cfg,
                         const std::function<void(const EpochRecord&)>& progress) {
  cfg.validate();
  const auto& out = cfg.out;
  std::filesystem::create_directories(out);
  write_text(out / "config.json", run_config_to_json(cfg));

  const auto parts = split(make_dataset(cfg.data), cfg.data.test_fraction);
  save_dataset(parts.train, out / "train.holods");
  save_dataset(parts.test, out / "test.holods");

  std::ofstream history(out / "history.jsonl", std::ios::binary | std::ios::trunc);
  std::ofstream timing(out / "timing.jsonl", std::ios::binary | std::ios::trunc);
  if (!history || !timing) throw DataError("cannot write history in " + out.string());

  TrainOptions opts = cfg.optim;
  opts.seed = cfg.seed;
  opts.on_epoch = [&](const EpochRecord& r, const ad::ParamStore&) {
    ojson h;
    h["epoch"] = r.epoch;
    h["lr"] = r.lr;
    h["loss"] = loss_json(r.loss);
    history << h.dump() << '\n' << std::flush;
    timing << ojson{{"epoch", r.epoch}, {"wall_seconds", r.wall_seconds}}.dump() << '\n'
           << std::flush;
    if (progress) progress(r);
  };

  TrainRunResult res;
  res.train = train(cfg.model, parts.train, opts, init_params(cfg.model, cfg.seed));
  save_checkpoint(out / "checkpoint.holock", cfg.model, res.train.params);
  res.metrics = evaluate(parts.test, res.train.params, cfg.model);
  write_text(out / "metrics.json", metrics_json(res.metrics, cfg.model));
  return res;
}

EvalMetrics cmd_eval(const std::filesystem::path& checkpoint, const std::filesystem::path& dataset,
                     const std::filesystem::path& out) {
  const auto ck = load_checkpoint(checkpoint);
  const auto data = load_dataset(dataset);
  auto m = evaluate(data, ck.params, ck.config);
  write_text(out / "eval.json", metrics_json(m, ck.config));
  return m;
}

// ---- robustness ---------------------------------------------------------------------

RobustnessReport robustness_sweep(const Dataset& data, const ad::ParamStore& params,
                                  const ModelConfig& cfg, NoiseAxis axis,
                                  const std::vector<double>& grid, std::uint64_t noise_seed) {
  validate_grid(grid);
  const bool cls = cfg.task == TaskKind::kClassification;
  std::vector<double> metric;
  metric.reserve(grid.size());
  for (const double level : grid) {
    Dataset noisy = data;
    if (level > 0.0) {
      NoiseSpec ns;
      ns.seed = noise_seed;
      (axis == NoiseAxis::kSigma ? ns.sigma : ns.tau) = level;
      noisy = apply_noise(data, ns);
    }
    metric.push_back(evaluate(noisy, params, cfg).headline());
  }
  return summarize_robustness(cfg.task, axis, cls ? "accuracy" : "mae", cls, grid,
                              std::move(metric));
}

std::string robustness_json(const RobustnessReport& r, bool pretty) {
  ojson j;
  j["task"] = to_string(r.task);
  j["axis"] = to_string(r.axis);
  j["metric"] = r.metric_name;
  j["higher_is_better"] = r.higher_is_better;
  j["change"] = r.higher_is_better ? "RD" : "RI";
  j["grid"] = r.grid;
  j["values"] = r.metric;
  j["clean"] = r.clean;
  j["relative_change_pct"] = r.relative_change;
  j["rauc"] = r.rauc;
  return (pretty ? j.dump(2) : j.dump()) + "\n";
}

std::string robustness_csv(const RobustnessReport& r) {
  std::string s = "level," + r.metric_name + "," + (r.higher_is_better ? "rd_pct" : "ri_pct") + "\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    s += ojson(r.grid[i]).dump() + "," + ojson(r.metric[i]).dump() + "," +
         ojson(r.relative_change[i]).dump() + "\n";
  }
  return s;
}

RobustnessReport cmd_robustness(const std::filesystem::path& checkpoint,
                                const std::filesystem::path& dataset, NoiseAxis axis,
                                const std::vector<double>& grid, std::uint64_t noise_seed,
                                const std::filesystem::path& out) {
  const auto ck = load_checkpoint(checkpoint);
  const auto data = load_dataset(dataset);
  auto r = robustness_sweep(data, ck.params, ck.config, axis, grid, noise_seed);
  const auto stem = "robustness_" + to_string(axis);
  write_text(out / (stem + ".json"), robustness_json(r));
  write_text(out / (stem + ".csv"), robustness_csv(r));
  return r;
}

}  // namespace holo
