#pragma once

// Experiment configuration: model, data, optimiser, seeds and outputs.
//
// JSON schema (every key optional, unknown keys rejected):
//
//   {
//     "seed": 0,                      model init, shuffling and dropout
//     "out": "runs/default",
//     "model": { ModelConfig keys; shape keys default from "data" },
//     "data": {
//       "generator": "phase_classification" | "phasor_prediction",
//       "n": 4000, "seq_len": 16, "dim": 4, "num_classes": 4,
//       "phase_noise": 1.2, "doppler": 3.141593,
//       "t_in": 12, "t_out": 12, "n_phasors": 1, "doppler_range": 0.1, "speed_kmh": 30,
//       "test_fraction": 0.2, "seed": 1
//     },
//     "optim": {
//       "lr": 1e-3, "beta1": 0.9, "beta2": 0.999, "eps": 1e-8, "weight_decay": 1e-5,
//       "epochs": 30, "batch_size": 16, "monitor_samples": 512,
//       "schedule": { "kind": "step" | "plateau" | "none", "step_size": 5, "gamma": 0.8,
//                     "patience": 5, "factor": 0.5 }
//     },
//     "robustness": { "axis": "sigma" | "tau", "grid": [0, 0.1, 0.2, 0.4], "seed": 7 },
//     "gradcheck": { "seeds": 5, "tolerance": 1e-5, "h": 1e-5 },
//     "verify": { "seed": 0 }
//   }

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "holo/metrics.hpp"
#include "holo/model.hpp"
#include "holo/synthdata.hpp"
#include "holo/training.hpp"

namespace holo {

struct DataSpec {
  std::string generator = "phase_classification";
  std::size_t n = 4000;
  std::size_t seq_len = 16;
  std::size_t dim = 4;
  std::size_t num_classes = 4;
  PhaseClassificationOptions phase{};
  PhasorPredictionOptions phasor{};
  double test_fraction = 0.2;
  std::uint64_t seed = 1;

  TaskKind task() const;
  void validate() const;
};

struct RobustnessSpec {
  NoiseAxis axis = NoiseAxis::kSigma;
  std::vector<double> grid;  // empty -> default_grid(axis)
  std::uint64_t seed = 7;
};

struct GradCheckSpec {
  std::size_t seeds = 5;
  double tolerance = 1e-5;
  double h = 1e-5;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out = "runs/default";
  ModelConfig model{};
  DataSpec data{};
  TrainOptions optim{};
  RobustnessSpec robustness{};
  GradCheckSpec gradcheck{};
  std::uint64_t verify_seed = 0;

  /// Checks cross-block consistency; throws ConfigError.
  void validate() const;
};

/// Task defaults: classification uses step decay (5 epochs, x0.8) and batch
/// 16; regression uses plateau decay (patience 5, x0.5) and batch 8. Both
/// use Adam with lr 1e-3 and weight decay 1e-5.
RunConfig default_run_config(TaskKind task = TaskKind::kClassification);

RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
/// Canonical pretty-printed JSON of every field.
std::string run_config_to_json(const RunConfig& cfg);

/// Builds the configured dataset (deterministic in data.seed).
Dataset make_dataset(const DataSpec& spec);

}  // namespace holo
