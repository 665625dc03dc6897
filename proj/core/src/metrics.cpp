#include "holo/metrics.hpp"

#include <cmath>

namespace holo {

ClassificationMetrics classification_metrics(std::span<const std::size_t> truth,
                                             std::span<const std::size_t> pred,
                                             std::size_t num_classes) {
  if (truth.size() != pred.size()) {
    throw DataError("classification_metrics: " + std::to_string(truth.size()) + " labels vs " +
                    std::to_string(pred.size()) + " predictions");
  }
  if (truth.empty()) throw DataError("classification_metrics: no samples");
  if (num_classes == 0) throw ConfigError("classification_metrics: num_classes must be >= 1");
  ClassificationMetrics m;
  m.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= num_classes || pred[i] >= num_classes) {
      throw DataError("classification_metrics: label out of range");
    }
    ++m.confusion[truth[i]][pred[i]];
    correct += truth[i] == pred[i];
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());

  std::size_t tp_all = 0, fp_all = 0, fn_all = 0, present = 0;
  double f1_sum = 0.0;
  m.per_class_f1.assign(num_classes, 0.0);
  for (std::size_t c = 0; c < num_classes; ++c) {
    std::size_t tp = m.confusion[c][c], fp = 0, fn = 0;
    for (std::size_t o = 0; o < num_classes; ++o) {
      if (o == c) continue;
      fp += m.confusion[o][c];
      fn += m.confusion[c][o];
    }
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
    const std::size_t denom = 2 * tp + fp + fn;
    if (denom == 0) continue;
    m.per_class_f1[c] = 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    f1_sum += m.per_class_f1[c];
    ++present;
  }
  m.macro_f1 = f1_sum / static_cast<double>(present);
  m.micro_f1 = 2.0 * static_cast<double>(tp_all) / static_cast<double>(2 * tp_all + fp_all + fn_all);
  return m;
}

RegressionMetrics regression_metrics(std::span<const ComplexMatrix> truth,
                                     std::span<const ComplexMatrix> pred) {
  if (truth.size() != pred.size()) throw DataError("regression_metrics: count mismatch");
  if (truth.empty()) throw DataError("regression_metrics: no samples");
  double abs_sum = 0.0, sq_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!truth[i].same_shape(pred[i])) {
      throw DataError("regression_metrics: shape " + shape_str(pred[i]) + " vs " +
                      shape_str(truth[i]));
    }
    for (std::size_t k = 0; k < truth[i].size(); ++k) {
      const double e = std::abs(pred[i].data()[k] - truth[i].data()[k]);
      abs_sum += e;
      sq_sum += e * e;
    }
    count += truth[i].size();
  }
  if (count == 0) throw DataError("regression_metrics: empty tensors");
  return {abs_sum / static_cast<double>(count), std::sqrt(sq_sum / static_cast<double>(count))};
}

double rms(std::span<const ComplexMatrix> xs) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& x : xs) {
    for (const auto& z : x.values()) s += std::norm(z);
    n += x.size();
  }
  if (n == 0) throw DataError("rms: no entries");
  return std::sqrt(s / static_cast<double>(n));
}

std::string to_string(NoiseAxis a) { return a == NoiseAxis::kSigma ? "sigma" : "tau"; }

NoiseAxis noise_axis_from_string(const std::string& s) {
  if (s == "sigma") return NoiseAxis::kSigma;
  if (s == "tau") return NoiseAxis::kTau;
  throw ConfigError("unknown noise axis '" + s + "' (expected sigma or tau)");
}

void validate_grid(std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("noise grid is empty");
  if (grid.front() != 0.0) throw ConfigError("noise grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ConfigError("noise grid must be strictly increasing");
  }
}

std::vector<double> default_grid(NoiseAxis axis) {
  if (axis == NoiseAxis::kSigma) return {0.0, 0.1, 0.2, 0.4};
  return {0.0, 0.02, 0.05, 0.10};
}

RobustnessReport summarize_robustness(TaskKind task, NoiseAxis axis, std::string metric_name,
                                      bool higher_is_better, std::vector<double> grid,
                                      std::vector<double> metric) {
  validate_grid(grid);
  if (metric.size() != grid.size()) throw DataError("robustness: one metric per grid level");
  RobustnessReport r;
  r.task = task;
  r.axis = axis;
  r.metric_name = std::move(metric_name);
  r.higher_is_better = higher_is_better;
  r.clean = metric.front();
  const double floor = 1e-12;
  std::vector<double> ratio(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double m = metric[i];
    if (i == 0) {
      r.relative_change.push_back(0.0);
      ratio[i] = 1.0;
      continue;
    }
    const double clean = std::max(r.clean, floor);
    r.relative_change.push_back(higher_is_better ? 100.0 * (r.clean - m) / clean
                                                 : 100.0 * (m - r.clean) / clean);
    ratio[i] = higher_is_better ? m / clean : r.clean / std::max(m, floor);
    if (!higher_is_better && r.clean == 0.0 && m == 0.0) ratio[i] = 1.0;
  }
  if (grid.size() == 1) {
    r.rauc = ratio[0];
  } else {
    double area = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      area += 0.5 * (ratio[i] + ratio[i - 1]) * (grid[i] - grid[i - 1]);
    }
    r.rauc = area / (grid.back() - grid.front());
  }
  r.grid = std::move(grid);
  r.metric = std::move(metric);
  return r;
}

}  // namespace holo
