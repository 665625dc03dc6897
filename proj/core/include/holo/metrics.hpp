#pragma once

// Task metrics and the noise-sweep summaries RD / RI / RAUC.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "holo/ctensor.hpp"
#include "holo/synthdata.hpp"

namespace holo {

struct ClassificationMetrics {
  double accuracy = 0.0;
  /// Unweighted mean of per-class F1 over classes that occur in the truth or
  /// the predictions.
  double macro_f1 = 0.0;
  /// From global TP/FP/FN counts; equals accuracy for single-label data.
  double micro_f1 = 0.0;
  std::vector<double> per_class_f1;
  /// confusion[truth][pred]
  std::vector<std::vector<std::size_t>> confusion;
};

ClassificationMetrics classification_metrics(std::span<const std::size_t> truth,
                                             std::span<const std::size_t> pred,
                                             std::size_t num_classes);

struct RegressionMetrics {
  double mae = 0.0;   // mean |y_hat - y| per complex element
  double rmse = 0.0;  // sqrt(mean |y_hat - y|^2)
};

RegressionMetrics regression_metrics(std::span<const ComplexMatrix> truth,
                                     std::span<const ComplexMatrix> pred);

/// sqrt(mean |x|^2) over every entry.
double rms(std::span<const ComplexMatrix> xs);

enum class NoiseAxis { kSigma, kTau };

std::string to_string(NoiseAxis a);
NoiseAxis noise_axis_from_string(const std::string& s);

/// Throws ConfigError unless the grid is non-empty, starts at 0 and is
/// strictly increasing.
void validate_grid(std::span<const double> grid);

std::vector<double> default_grid(NoiseAxis axis);

struct RobustnessReport {
  TaskKind task = TaskKind::kClassification;
  NoiseAxis axis = NoiseAxis::kSigma;
  std::string metric_name;  // "accuracy", "mae", ...
  bool higher_is_better = true;
  std::vector<double> grid;
  std::vector<double> metric;
  double clean = 0.0;
  /// RD (higher_is_better) or RI, in percent of the clean value.
  std::vector<double> relative_change;
  double rauc = 0.0;
};

/// RD = 100 (clean - m) / clean for accuracy-like metrics, RI = 100 (m - clean)
/// / clean for errors. RAUC is the trapezoidal area of the ratio curve
/// (m / clean for accuracy, clean / m for errors) divided by the grid span;
/// a single-point grid gives the ratio at 0, i.e. 1. Zero denominators are
/// floored at 1e-12.
RobustnessReport summarize_robustness(TaskKind task, NoiseAxis axis, std::string metric_name,
                                      bool higher_is_better, std::vector<double> grid,
                                      std::vector<double> metric);

}  // namespace holo
