#pragma once

// Reverse-mode differentiation over complex matrices.
//
// Every tensor on the tape is a ComplexMatrix. Gradients follow the
// real-pair convention: for an entry z = x + iy of a real-valued objective
// L, the stored gradient is dL/dx + i dL/dy. Real-valued tensors (logits,
// scalar losses) are complex matrices with a zero imaginary part.
//
// Nodes are appended in evaluation order, so the tape is a topological
// order by construction; backward() walks it once in reverse.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "holo/attention.hpp"
#include "holo/ctensor.hpp"

namespace holo::ad {

struct Param {
  std::string name;
  ComplexMatrix value;
  ComplexMatrix grad;
  ComplexMatrix m;  // Adam first moment, per real component
  ComplexMatrix v;  // Adam second moment, per real component
};

/// Named parameters with mirrored gradient and optimiser buffers.
class ParamStore {
 public:
  ComplexMatrix& add(const std::string& name, ComplexMatrix init);

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  Param& at(const std::string& name);
  const Param& at(const std::string& name) const;

  std::vector<Param>& params() noexcept { return params_; }
  const std::vector<Param>& params() const noexcept { return params_; }

  /// Number of real scalars (two per complex entry).
  std::size_t real_count() const noexcept;
  void zero_grad();

  std::uint64_t step = 0;

 private:
  std::vector<Param> params_;
  std::map<std::string, std::size_t> index_;
};

class Tape;

/// Handle to a tape node. Cheap to copy; only valid for the tape that made it.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = std::numeric_limits<std::size_t>::max();

  const ComplexMatrix& value() const;
  const ComplexMatrix& grad() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  /// Real part of a 1x1 node.
  double scalar() const;
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Value that never receives a gradient.
  Var constant(ComplexMatrix value, std::string label = "const");
  /// Differentiable leaf that is not backed by a ParamStore entry.
  Var leaf(ComplexMatrix value, std::string label = "leaf");
  /// Differentiable leaf bound to `store[name]`; see accumulate_into().
  Var param(const ParamStore& store, const std::string& name);

  Var record(ComplexMatrix value, std::vector<Var> inputs, BackwardFn backward,
             std::string label);

  /// Seeds d(loss)/d(loss) = 1 and propagates to every node. `loss` must be 1x1.
  void backward(Var loss);

  /// Adds `scale` times each parameter leaf's gradient into the store.
  void accumulate_into(ParamStore& store, double scale = 1.0) const;

  const ComplexMatrix& value(std::size_t id) const { return nodes_.at(id).value; }
  const ComplexMatrix& grad(std::size_t id) const { return nodes_.at(id).grad; }
  /// Gradient buffer of node `id`, allocated on first use.
  ComplexMatrix& grad_buffer(std::size_t id);
  const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_.at(id).inputs; }
  const std::string& label(std::size_t id) const { return nodes_.at(id).label; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Label of the first node (in evaluation order) holding a non-finite value.
  std::optional<std::string> first_non_finite() const;

  /// Ops with kinks (ReLU, |dphi|, the branch cut of angle()) report how
  /// close their inputs came; finite-difference checks use this to resample.
  void note_kink_distance(double d) noexcept {
    if (d < min_kink_distance_) min_kink_distance_ = d;
  }
  double min_kink_distance() const noexcept { return min_kink_distance_; }

  void check(Var v) const;

 private:
  struct Node {
    ComplexMatrix value;
    ComplexMatrix grad;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    std::string label;
    std::string param_name;  // non-empty for parameter leaves
    bool requires_grad = false;
  };
  std::vector<Node> nodes_;
  double min_kink_distance_ = std::numeric_limits<double>::infinity();
};

// ---- differentiable ops ----------------------------------------------------

Var matmul(Var a, Var b);
Var add(Var a, Var b);
/// a + bias broadcast over rows; bias is 1 x cols.
Var add_row(Var a, Var bias);
Var scale(Var a, double s);
/// Elementwise multiply by a fixed real mask (dropout).
Var mask_mul(Var a, const RealMatrix& mask);
/// Row-wise complex layer norm; gain and bias are 1 x cols.
Var layer_norm(Var z, Var gain, Var bias, double eps);
/// ReLU applied separately to real and imaginary parts.
Var split_relu(Var a);
/// Phase-preserving magnitude squash z -> z tanh(|z|) / |z|.
Var phase_tanh(Var a);
Var slice_cols(Var a, std::size_t start, std::size_t count);
Var concat_cols(const std::vector<Var>& parts);
/// Mean over rows, giving 1 x cols.
Var mean_rows(Var a);
/// 1 x n complex row -> 1 x 2n real row [Re..., Im...].
Var re_im_concat(Var a);
/// Row-major reshape.
Var reshape(Var a, std::size_t rows, std::size_t cols);
/// One holographic attention head; the trace is copied out if requested.
Var attention_head(Var q, Var k, Var v, const AttentionConfig& cfg,
                   const RealMatrix* weight_mask = nullptr, AttentionTrace* trace_out = nullptr);

// ---- scalar losses (1x1 nodes) ---------------------------------------------

/// mean |pred - target|^2, identical to mean(Re^2 + Im^2).
Var mean_squared_error(Var pred, const ComplexMatrix& target);
/// Softmax cross-entropy on the real parts of a 1 x K logit row.
Var cross_entropy(Var logits, std::size_t label);
/// Mean wrapped L1 phase difference between consecutive rows.
Var phase_smoothness(Var z);
Var weighted_sum(std::span<const std::pair<double, Var>> terms);

// ---- numerical oracle ------------------------------------------------------

/// Central differences (f(x+h) - f(x-h)) / 2h for every component of x.
std::vector<double> finite_diff(const std::function<double(std::span<const double>)>& f,
                                std::vector<double> x, double h = 1e-5);

/// Central differences over every real component of every parameter.
/// `f` must be deterministic; the store is restored before returning.
/// The result mirrors the store layout using the real-pair convention.
std::vector<ComplexMatrix> finite_diff(const std::function<double(const ParamStore&)>& f,
                                       ParamStore& params, double h = 1e-5);

// ---- optimiser -------------------------------------------------------------

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// L2 penalty added to the gradient before the moment updates.
  double weight_decay = 0.0;
};

/// One bias-corrected Adam update on every real component.
void adam_step(ParamStore& store, const AdamOptions& opt);

}  // namespace holo::ad
