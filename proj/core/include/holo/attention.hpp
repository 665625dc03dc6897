#pragma once

// Holographic self-attention.
//
// For query/key rows Q_i, K_j the complex correlation s_ij = <Q_i, K_j>
// yields a phase difference dphi_ij = angle(s_ij) and a real cosine-style
// similarity sim_ij = Re(s_ij) / (|Q_i| |K_j| + eps). Scores are damped by
// phase mismatch, W_ij = sim_ij / sqrt(d_k) * exp(-alpha |dphi_ij|), softmaxed
// per query row, and each value is rotated by its phase offset before the
// weighted sum: H_i = sum_j a_ij V_j exp(j dphi_ij).

#include <cstddef>
#include <vector>

#include "holo/ctensor.hpp"

namespace holo {

struct AttentionConfig {
  /// Per-head width. 0 means "take it from the query columns".
  std::size_t d_k = 0;
  double alpha = 1.0;
  double eps = 1e-8;
  std::size_t heads = 1;
  bool ablate_phase_decay = false;
  bool ablate_coherent_sum = false;
  /// W = sim/sqrt(d_k) - gamma |dphi| instead of the multiplicative decay.
  bool additive_variant = false;
  double gamma = 1.0;

  void validate() const;
};

/// Everything one head computed, kept for interpretability and property checks.
struct AttentionTrace {
  ComplexMatrix s;       // T x T complex correlations
  RealMatrix delta_phi;  // angle(s), radians in (-pi, pi]
  RealMatrix sim;
  RealMatrix w;          // pre-softmax scores
  RealMatrix weights;    // row-softmax of w
  ComplexMatrix output;  // H
};

ComplexMatrix correlate(const ComplexMatrix& q, const ComplexMatrix& k);
RealMatrix phase_differences(const ComplexMatrix& s);
RealMatrix similarity(const ComplexMatrix& s, const ComplexMatrix& q, const ComplexMatrix& k,
                      double eps);
RealMatrix score(const RealMatrix& sim, const RealMatrix& delta_phi, const AttentionConfig& cfg);

/// H_i = sum_j weights_ij V_j exp(j dphi_ij); with `coherent == false` the
/// rotation is dropped and this is a plain weighted sum.
ComplexMatrix coherent_superpose(const RealMatrix& weights, const RealMatrix& delta_phi,
                                 const ComplexMatrix& v, bool coherent = true);

/// Full single-head pass. `weight_mask`, when given, multiplies the softmax
/// weights elementwise before superposition (dropout); the trace keeps the
/// unmasked weights.
AttentionTrace holographic_attention(const ComplexMatrix& q, const ComplexMatrix& k,
                                     const ComplexMatrix& v, const AttentionConfig& cfg,
                                     const RealMatrix* weight_mask = nullptr);

/// Cosine-similarity attention without phase decay or rotation.
ComplexMatrix standard_cosine_attention(const ComplexMatrix& q, const ComplexMatrix& k,
                                        const ComplexMatrix& v, double eps = 1e-8);

struct AttentionGrads {
  ComplexMatrix dq, dk, dv;
};

/// Reverse pass of holographic_attention. Gradients use the real-pair
/// convention g = dL/dRe + j dL/dIm. Non-smooth points take the
/// subgradient 0 (|x| at 0) and angle() uses a |s|^2 >= 1e-24 clamp.
AttentionGrads holographic_attention_backward(const ComplexMatrix& q, const ComplexMatrix& k,
                                              const ComplexMatrix& v, const AttentionTrace& trace,
                                              const ComplexMatrix& grad_output,
                                              const AttentionConfig& cfg,
                                              const RealMatrix* weight_mask = nullptr);

struct MultiHeadParams {
  std::vector<ComplexMatrix> w_q, w_k, w_v;  // each d_model x d_k
  ComplexMatrix w_o;                         // d_model x d_model
};

struct MultiHeadResult {
  ComplexMatrix output;
  std::vector<AttentionTrace> traces;
};

MultiHeadResult multi_head(const ComplexMatrix& x, const MultiHeadParams& params,
                           const AttentionConfig& cfg);

}  // namespace holo
