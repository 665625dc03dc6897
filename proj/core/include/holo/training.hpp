#pragma once

// Mini-batch Adam training, learning-rate schedules and the model-level
// gradient check.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "holo/autodiff.hpp"
#include "holo/model.hpp"
#include "holo/synthdata.hpp"

namespace holo {

/// Raised when a loss goes non-finite; what() names the first bad tensor.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScheduleKind { kNone, kStep, kPlateau };

std::string to_string(ScheduleKind k);
ScheduleKind schedule_kind_from_string(const std::string& s);

struct ScheduleOptions {
  ScheduleKind kind = ScheduleKind::kNone;
  std::size_t step_size = 5;  // kStep: multiply by gamma every step_size epochs
  double gamma = 0.8;
  std::size_t patience = 5;  // kPlateau: epochs without improvement before decaying
  double factor = 0.5;
  double threshold = 1e-4;  // relative improvement that resets patience
  double min_lr = 0.0;

  void validate() const;
};

class LrSchedule {
 public:
  LrSchedule(double base_lr, ScheduleOptions opts);
  double lr() const noexcept { return lr_; }
  /// Call once per finished epoch with the monitored loss.
  void epoch_end(double monitored);

 private:
  ScheduleOptions opts_;
  double lr_;
  std::size_t epochs_ = 0;
  double best_;
  std::size_t bad_epochs_ = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  LossBreakdown loss;     // evaluation-mode mean over the monitor subset
  double lr = 0.0;        // rate used during this epoch
  double wall_seconds = 0.0;
};

struct TrainOptions {
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  ad::AdamOptions adam{};
  ScheduleOptions schedule{};
  std::uint64_t seed = 0;
  bool shuffle = true;
  /// Epoch losses are measured on the first monitor_samples training samples
  /// (0 = all of them).
  std::size_t monitor_samples = 512;
  std::function<void(const EpochRecord&, const ad::ParamStore&)> on_epoch;
};

struct TrainResult {
  ad::ParamStore params;
  std::vector<EpochRecord> history;
};

/// Gradients are averaged over each batch in sample order, so results do not
/// depend on how the per-sample passes are scheduled.
TrainResult train(const ModelConfig& cfg, const Dataset& data, const TrainOptions& opts,
                  ad::ParamStore params);

// ---- gradient check -----------------------------------------------------------------

struct GradCheckOptions {
  double h = 1e-5;
  double tolerance = 1e-5;
  /// Draws whose forward pass comes within this distance of a kink
  /// (|dphi| = 0, the +-pi cut, a split-ReLU hinge) are redrawn.
  double kink_margin = 1e-4;
  std::size_t max_redraws = 50;
};

struct TensorGradError {
  std::string name;
  double rel_err = 0.0;  // ||a - n|| / max(||a||, ||n||, 1e-8)
  double max_abs_err = 0.0;
};

struct GradCheckReport {
  std::uint64_t seed = 0;
  std::size_t redraws = 0;
  double min_kink_distance = 0.0;
  double max_rel_err = 0.0;
  std::vector<TensorGradError> tensors;
  bool pass = false;
};

/// Random parameters, input and label/target; the analytic gradient of the
/// evaluation-mode total loss against central differences on every real
/// parameter component.
GradCheckReport grad_check(const ModelConfig& cfg, std::uint64_t seed,
                           const GradCheckOptions& opts = {});

}  // namespace holo
