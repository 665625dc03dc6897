#pragma once

// Complex encoder with a dual-headed decoder.
//
// Input X (T x d_in) is embedded as Z = X W_e + PE, passed through `layers`
// encoder blocks
//
//   Z <- LN(Z + MHA(Z))
//   Z <- LN(Z + FFN(Z))
//
// and decoded twice: a linear reconstruction head back to T x d_in and a
// task head (class logits or a horizon x d_out forecast). Training minimises
// lambda_r L_recon + lambda_t L_task + lambda_p R_phase.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "holo/attention.hpp"
#include "holo/autodiff.hpp"
#include "holo/ctensor.hpp"
#include "holo/synthdata.hpp"

namespace holo {

enum class FfnActivation {
  kSplitRelu,   // ReLU on Re and Im separately
  kPhaseTanh,   // z tanh(|z|)/|z|, commutes with global rotation
};

std::string to_string(FfnActivation a);
FfnActivation ffn_activation_from_string(const std::string& s);

struct ModelConfig {
  std::size_t seq_len = 16;
  std::size_t d_in = 4;
  std::size_t d_model = 32;
  std::size_t heads = 4;
  std::size_t layers = 2;
  std::size_t d_ff = 64;

  double alpha = 1.0;
  double attn_eps = 1e-8;
  double ln_eps = 1e-5;
  bool additive_variant = false;
  double gamma = 1.0;

  double lambda_r = 1.0;
  double lambda_t = 1.0;
  double lambda_p = 0.01;

  TaskKind task = TaskKind::kClassification;
  std::size_t num_classes = 4;
  std::size_t d_out = 1;
  std::size_t horizon = 12;

  double dropout = 0.1;

  bool ablate_phase_decay = false;
  bool ablate_coherent_sum = false;
  bool ablate_reconstruction = false;
  /// Feed |X| instead of X: the phase-blind ingestion baseline.
  bool magnitude_only = false;

  bool positional_encoding = true;
  FfnActivation ffn_activation = FfnActivation::kSplitRelu;

  void validate() const;
  AttentionConfig attention() const;
  std::size_t d_k() const { return d_model / heads; }
  double effective_lambda_r() const { return ablate_reconstruction ? 0.0 : lambda_r; }
};

struct LossBreakdown {
  double recon = 0.0;
  double task = 0.0;
  double phase_reg = 0.0;
  double total = 0.0;
};

// ---- building blocks (value level) ------------------------------------------------

/// PE[t, k] = exp(j t w_k), w_k = 10000^(-k / d_model).
ComplexMatrix positional_encoding(std::size_t seq_len, std::size_t d_model);

/// X W_e (+ PE).
ComplexMatrix embed(const ComplexMatrix& x, const ComplexMatrix& w_e, bool add_positional = true);

ComplexMatrix complex_ffn(const ComplexMatrix& z, const ComplexMatrix& w1, const ComplexMatrix& b1,
                          const ComplexMatrix& w2, const ComplexMatrix& b2,
                          FfnActivation act = FfnActivation::kSplitRelu);

/// Parameter names are stable and documented in the README:
///   embed.w, layer{l}.attn.{q,k,v}{h}, layer{l}.attn.o, layer{l}.ln{1,2}.{gain,bias},
///   layer{l}.ffn.{w1,b1,w2,b2}, recon.w, task.w, task.b
ad::ParamStore init_params(const ModelConfig& cfg, std::uint64_t seed);

// ---- differentiable forward -------------------------------------------------------

struct ForwardOptions {
  bool training = false;
  std::mt19937_64* rng = nullptr;  // required when training with dropout > 0
};

struct ForwardVars {
  ad::Var encoded;      // Z_L, T x d_model
  ad::Var recon;        // T x d_in
  ad::Var task_output;  // 1 x K logits or horizon x d_out forecast
  std::vector<AttentionTrace> traces;  // layer-major, head-minor
};

ForwardVars forward(ad::Tape& tape, const ad::ParamStore& params, const ComplexMatrix& x,
                    const ModelConfig& cfg, const ForwardOptions& opts = {});

struct LossVars {
  ad::Var total, recon, task, phase_reg;
};

/// `label` is read for classification, `target` for regression.
LossVars sample_loss(ad::Tape& tape, const ForwardVars& fwd, const ComplexMatrix& x,
                     std::size_t label, const ComplexMatrix* target, const ModelConfig& cfg);

// ---- evaluation-mode API ------------------------------------------------------------

struct EncodeResult {
  ComplexMatrix z;
  std::vector<AttentionTrace> traces;
};

EncodeResult encode(const ComplexMatrix& x, const ad::ParamStore& params, const ModelConfig& cfg);

ComplexMatrix recon_head(const ComplexMatrix& z, const ComplexMatrix& w_r);

struct TaskOutput {
  std::vector<double> logits;  // classification
  ComplexMatrix prediction;    // regression, horizon x d_out
};

TaskOutput task_head(const ComplexMatrix& z, const ModelConfig& cfg, const ComplexMatrix& w_t,
                     const ComplexMatrix& b_t);

/// mean over entries of Re(d)^2 + Im(d)^2, d = X_hat - X.
double recon_loss(const ComplexMatrix& x_hat, const ComplexMatrix& x);
/// Softmax cross-entropy, natural log.
double task_loss(std::span<const double> logits, std::size_t label);
/// Mean squared complex error.
double task_loss(const ComplexMatrix& pred, const ComplexMatrix& target);
/// Mean over the (T-1) x d wrapped phase steps of |wrap(phi[t+1] - phi[t])|.
double phase_reg(const ComplexMatrix& z);

/// Batch-mean of every loss term in evaluation mode (no dropout).
LossBreakdown total_loss(const Dataset& batch, const ad::ParamStore& params,
                         const ModelConfig& cfg);

struct Prediction {
  std::size_t label = 0;
  std::vector<double> logits;
  ComplexMatrix sequence;
};

Prediction predict(const ComplexMatrix& x, const ad::ParamStore& params, const ModelConfig& cfg);

// ---- checkpoint container -----------------------------------------------------------
//
//   8 bytes  magic "HOLOCK01"
//   u32      config length L, then L bytes of JSON model config
//   u32      tensor count N
//   N times: u32 name length, name bytes, u64 rows, u64 cols,
//            rows*cols (re, im) little-endian f64 pairs

std::string model_config_to_json(const ModelConfig& cfg);
/// Unknown keys are rejected with ConfigError.
ModelConfig model_config_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& cfg,
                     const ad::ParamStore& params);

struct Checkpoint {
  ModelConfig config;
  ad::ParamStore params;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace holo
