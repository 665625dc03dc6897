#pragma once

// The experiment commands behind the holo CLI. Each writes its artifacts
// under cfg.out and returns a structured result; metric artifacts are pure
// functions of the config (wall-clock timings go to timing.jsonl only).
//
// Run directory layout:
//   config.json        resolved RunConfig
//   train.holods       training split        test.holods   test split
//   checkpoint.holock  trained parameters
//   history.jsonl      one LossBreakdown per epoch
//   timing.jsonl       per-epoch wall seconds (not deterministic)
//   metrics.json       test-split metrics
//   robustness_<axis>.json / .csv
//   verify.jsonl       one CheckReport per line
//   gradcheck.jsonl    one GradCheckReport per (head, seed)

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "holo/metrics.hpp"
#include "holo/run_config.hpp"
#include "holo/theory.hpp"
#include "holo/training.hpp"

namespace holo {

struct VerifyResult {
  std::vector<CheckReport> reports;
  bool ok = false;  // every report acceptable()
};

/// Ablation flags in cfg.model become negative controls.
VerifyResult cmd_verify(const RunConfig& cfg);

/// The small model used by gradcheck: T=4, d_model=8, heads=2, one layer,
/// with alpha, variant and ablation flags taken from `base`.
ModelConfig gradcheck_model(const ModelConfig& base, TaskKind task);

struct GradCheckResult {
  std::vector<std::pair<TaskKind, GradCheckReport>> reports;
  double max_rel_err = 0.0;
  bool ok = false;
};

/// Both task heads over cfg.gradcheck.seeds seeds.
GradCheckResult cmd_gradcheck(const RunConfig& cfg);

struct EvalMetrics {
  TaskKind task = TaskKind::kClassification;
  std::size_t n = 0;
  ClassificationMetrics classification;  // task == kClassification
  RegressionMetrics regression;          // task == kRegression
  LossBreakdown loss;

  /// accuracy or mae
  double headline() const;
};

EvalMetrics evaluate(const Dataset& data, const ad::ParamStore& params, const ModelConfig& cfg);

/// The metrics.json document; `pretty` false gives a single line.
std::string metrics_json(const EvalMetrics& m, const ModelConfig& cfg, bool pretty = true);

struct TrainRunResult {
  TrainResult train;
  EvalMetrics metrics;  // test split
};

/// Generates and splits the dataset, trains, evaluates on the test split.
TrainRunResult cmd_train(const RunConfig& cfg,
                         const std::function<void(const EpochRecord&)>& progress = {});

EvalMetrics cmd_eval(const std::filesystem::path& checkpoint,
                        const std::filesystem::path& dataset, const std::filesystem::path& out);

/// Metric per grid level on noisy copies of `data`; every level uses the
/// same perturbation seed.
RobustnessReport robustness_sweep(const Dataset& data, const ad::ParamStore& params,
                                  const ModelConfig& cfg, NoiseAxis axis,
                                  const std::vector<double>& grid, std::uint64_t noise_seed);

RobustnessReport cmd_robustness(const std::filesystem::path& checkpoint,
                                const std::filesystem::path& dataset, NoiseAxis axis,
                                const std::vector<double>& grid, std::uint64_t noise_seed,
                                const std::filesystem::path& out);

std::string robustness_json(const RobustnessReport& r, bool pretty = true);
/// grid level, metric, relative change; one row per level.
std::string robustness_csv(const RobustnessReport& r);
std::string to_json_line(const GradCheckReport& r, TaskKind task);

/// Writes text exactly (no locale, '\n' line ends); creates parent dirs.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace holo
