#include "holo/attention.hpp"

#include <cmath>
#include <string>

namespace holo {

namespace {

constexpr double kAngleClamp = 1e-24;

inline double sign_or_zero(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_same_width(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": width mismatch " + shape_str(a) + " vs " +
                         shape_str(b));
  }
}

std::size_t resolve_dk(const AttentionConfig& cfg, std::size_t width) {
  if (cfg.d_k != 0 && cfg.d_k != width) {
    throw DimensionError("attention: configured d_k " + std::to_string(cfg.d_k) +
                         " but inputs have width " + std::to_string(width));
  }
  return width;
}

}  // namespace

void AttentionConfig::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("attention: alpha must be >= 0");
  if (!(eps > 0.0)) throw ConfigError("attention: eps must be > 0");
  if (heads < 1) throw ConfigError("attention: heads must be >= 1");
  if (additive_variant && !(gamma >= 0.0)) throw ConfigError("attention: gamma must be >= 0");
}

ComplexMatrix correlate(const ComplexMatrix& q, const ComplexMatrix& k) {
  require_same_width(q, k, "correlate");
  return matmul_nh(q, k);
}

RealMatrix phase_differences(const ComplexMatrix& s) {
  RealMatrix dphi(s.rows(), s.cols());
  for (std::size_t i = 0; i < s.size(); ++i) dphi.data()[i] = angle(s.data()[i]);
  return dphi;
}

RealMatrix similarity(const ComplexMatrix& s, const ComplexMatrix& q, const ComplexMatrix& k,
                      double eps) {
  if (s.rows() != q.rows() || s.cols() != k.rows()) {
    throw DimensionError("similarity: correlations " + shape_str(s) + " vs Q " + shape_str(q) +
                         ", K " + shape_str(k));
  }
  const auto nq = row_norms(q);
  const auto nk = row_norms(k);
  RealMatrix sim(s.rows(), s.cols());
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j) sim(i, j) = s(i, j).real() / (nq[i] * nk[j] + eps);
  return sim;
}

RealMatrix score(const RealMatrix& sim, const RealMatrix& delta_phi, const AttentionConfig& cfg) {
  if (!sim.same_shape(delta_phi)) {
    throw DimensionError("score: " + shape_str(sim) + " vs " + shape_str(delta_phi));
  }
  if (cfg.d_k == 0) throw ConfigError("score: d_k must be set");
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(cfg.d_k));
  RealMatrix w(sim.rows(), sim.cols());
  for (std::size_t i = 0; i < sim.size(); ++i) {
    const double base = sim.data()[i] * inv_sqrt_dk;
    const double mismatch = std::abs(delta_phi.data()[i]);
    if (cfg.ablate_phase_decay) {
      w.data()[i] = base;
    } else if (cfg.additive_variant) {
      w.data()[i] = base - cfg.gamma * mismatch;
    } else {
      w.data()[i] = base * std::exp(-cfg.alpha * mismatch);
    }
  }
  return w;
}

ComplexMatrix coherent_superpose(const RealMatrix& weights, const RealMatrix& delta_phi,
                                 const ComplexMatrix& v, bool coherent) {
  if (!weights.same_shape(delta_phi) || weights.cols() != v.rows()) {
    throw DimensionError("coherent_superpose: weights " + shape_str(weights) + ", dphi " +
                         shape_str(delta_phi) + ", V " + shape_str(v));
  }
  ComplexMatrix h(weights.rows(), v.cols());
  for (std::size_t i = 0; i < weights.rows(); ++i) {
    auto hi = h.row(i);
    for (std::size_t j = 0; j < weights.cols(); ++j) {
      const double a = weights(i, j);
      const cplx c = coherent ? std::polar(a, delta_phi(i, j)) : cplx{a, 0.0};
      auto vj = v.row(j);
      for (std::size_t k = 0; k < vj.size(); ++k) hi[k] += c * vj[k];
    }
  }
  return h;
}

AttentionTrace holographic_attention(const ComplexMatrix& q, const ComplexMatrix& k,
                                     const ComplexMatrix& v, const AttentionConfig& cfg,
                                     const RealMatrix* weight_mask) {
  cfg.validate();
  require_same_width(q, k, "holographic_attention");
  if (q.rows() == 0) throw DimensionError("holographic_attention: T must be >= 1");
  if (k.rows() != v.rows()) {
    throw DimensionError("holographic_attention: K " + shape_str(k) + " vs V " + shape_str(v));
  }
  AttentionConfig local = cfg;
  local.d_k = resolve_dk(cfg, q.cols());

  AttentionTrace tr;
  tr.s = correlate(q, k);
  tr.delta_phi = phase_differences(tr.s);
  tr.sim = similarity(tr.s, q, k, cfg.eps);
  tr.w = score(tr.sim, tr.delta_phi, local);
  tr.weights = row_softmax(tr.w);
  if (weight_mask) {
    if (!weight_mask->same_shape(tr.weights)) {
      throw DimensionError("holographic_attention: weight mask " + shape_str(*weight_mask));
    }
    RealMatrix masked = tr.weights;
    for (std::size_t i = 0; i < masked.size(); ++i) masked.data()[i] *= weight_mask->data()[i];
    tr.output = coherent_superpose(masked, tr.delta_phi, v, !cfg.ablate_coherent_sum);
  } else {
    tr.output = coherent_superpose(tr.weights, tr.delta_phi, v, !cfg.ablate_coherent_sum);
  }
  return tr;
}

ComplexMatrix standard_cosine_attention(const ComplexMatrix& q, const ComplexMatrix& k,
                                        const ComplexMatrix& v, double eps) {
  require_same_width(q, k, "standard_cosine_attention");
  if (k.rows() != v.rows()) {
    throw DimensionError("standard_cosine_attention: K " + shape_str(k) + " vs V " +
                         shape_str(v));
  }
  const auto s = correlate(q, k);
  RealMatrix w = similarity(s, q, k, eps);
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  for (auto& x : w.values()) x *= inv_sqrt_dk;
  const auto weights = row_softmax(w);
  RealMatrix zero(weights.rows(), weights.cols());
  return coherent_superpose(weights, zero, v, false);
}

AttentionGrads holographic_attention_backward(const ComplexMatrix& q, const ComplexMatrix& k,
                                              const ComplexMatrix& v, const AttentionTrace& tr,
                                              const ComplexMatrix& grad_output,
                                              const AttentionConfig& cfg,
                                              const RealMatrix* weight_mask) {
  const std::size_t t_q = q.rows(), t_k = k.rows(), d = q.cols();
  if (!grad_output.same_shape(tr.output)) {
    throw DimensionError("attention backward: grad " + shape_str(grad_output) + " vs output " +
                         shape_str(tr.output));
  }
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(d));
  const bool coherent = !cfg.ablate_coherent_sum;

  AttentionGrads g{ComplexMatrix(t_q, d), ComplexMatrix(t_k, d), ComplexMatrix(v.rows(), v.cols())};

  // Per (i, j): c_ij = m_ij a_ij R_ij with R_ij = exp(j dphi_ij) and H_i = sum_j c_ij V_j.
  RealMatrix g_a(t_q, t_k);    // dL/d a_ij (softmax output, before the mask)
  RealMatrix g_phi(t_q, t_k);  // dL/d dphi_ij
  for (std::size_t i = 0; i < t_q; ++i) {
    auto gh = grad_output.row(i);
    for (std::size_t j = 0; j < t_k; ++j) {
      const double m = weight_mask ? (*weight_mask)(i, j) : 1.0;
      const double a = tr.weights(i, j);
      const cplx r = coherent ? std::polar(1.0, tr.delta_phi(i, j)) : cplx{1.0, 0.0};
      auto vj = v.row(j);
      // G_c = sum_k G_H_ik conj(V_jk)
      const cplx gc = cdot(gh, vj);
      const cplx c = m * a * r;
      auto dvj = g.dv.row(j);
      const cplx cc = std::conj(c);
      for (std::size_t kk = 0; kk < dvj.size(); ++kk) dvj[kk] += cc * gh[kk];
      const cplx gc_conj_r = gc * std::conj(r);
      g_a(i, j) = m * gc_conj_r.real();
      if (coherent) g_phi(i, j) = m * a * gc_conj_r.imag();
    }
  }

  // Softmax backward, per row.
  RealMatrix g_w(t_q, t_k);
  for (std::size_t i = 0; i < t_q; ++i) {
    double dotp = 0.0;
    for (std::size_t j = 0; j < t_k; ++j) dotp += tr.weights(i, j) * g_a(i, j);
    for (std::size_t j = 0; j < t_k; ++j) g_w(i, j) = tr.weights(i, j) * (g_a(i, j) - dotp);
  }

  const auto nq = row_norms(q);
  const auto nk = row_norms(k);
  std::vector<double> g_nq(t_q, 0.0), g_nk(t_k, 0.0);
  ComplexMatrix g_s(t_q, t_k);
  for (std::size_t i = 0; i < t_q; ++i) {
    for (std::size_t j = 0; j < t_k; ++j) {
      const double phi = tr.delta_phi(i, j);
      const double sim = tr.sim(i, j);
      double g_sim = 0.0;
      double gp = g_phi(i, j);
      if (cfg.ablate_phase_decay) {
        g_sim = g_w(i, j) * inv_sqrt_dk;
      } else if (cfg.additive_variant) {
        g_sim = g_w(i, j) * inv_sqrt_dk;
        gp += -cfg.gamma * sign_or_zero(phi) * g_w(i, j);
      } else {
        const double e = std::exp(-cfg.alpha * std::abs(phi));
        g_sim = g_w(i, j) * e * inv_sqrt_dk;
        gp += g_w(i, j) * sim * inv_sqrt_dk * e * (-cfg.alpha) * sign_or_zero(phi);
      }
      const cplx s = tr.s(i, j);
      const double denom = nq[i] * nk[j] + cfg.eps;
      double gs_re = g_sim / denom;
      double gs_im = 0.0;
      const double g_denom = -g_sim * s.real() / (denom * denom);
      g_nq[i] += g_denom * nk[j];
      g_nk[j] += g_denom * nq[i];
      if (gp != 0.0) {
        const double mag2 = std::max(std::norm(s), kAngleClamp);
        gs_re += gp * (-s.imag()) / mag2;
        gs_im += gp * s.real() / mag2;
      }
      g_s(i, j) = {gs_re, gs_im};
    }
  }

  // s = Q K^H  =>  dQ = G_s K,  dK = G_s^H Q.
  g.dq = matmul(g_s, k);
  g.dk = matmul_hn(g_s, q);
  for (std::size_t i = 0; i < t_q; ++i) {
    if (nq[i] == 0.0) continue;
    auto qi = q.row(i);
    auto dqi = g.dq.row(i);
    for (std::size_t kk = 0; kk < d; ++kk) dqi[kk] += g_nq[i] * qi[kk] / nq[i];
  }
  for (std::size_t j = 0; j < t_k; ++j) {
    if (nk[j] == 0.0) continue;
    auto kj = k.row(j);
    auto dkj = g.dk.row(j);
    for (std::size_t kk = 0; kk < d; ++kk) dkj[kk] += g_nk[j] * kj[kk] / nk[j];
  }
  return g;
}

namespace {

ComplexMatrix concat_cols(const std::vector<ComplexMatrix>& parts) {
  if (parts.empty()) return {};
  std::size_t cols = 0;
  for (const auto& p : parts) cols += p.cols();
  ComplexMatrix out(parts.front().rows(), cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < p.rows(); ++r)
      for (std::size_t c = 0; c < p.cols(); ++c) out(r, off + c) = p(r, c);
    off += p.cols();
  }
  return out;
}

}  // namespace

MultiHeadResult multi_head(const ComplexMatrix& x, const MultiHeadParams& params,
                           const AttentionConfig& cfg) {
  cfg.validate();
  const std::size_t d_model = x.cols();
  if (d_model % cfg.heads != 0) {
    throw ConfigError("multi_head: d_model " + std::to_string(d_model) +
                      " not divisible by heads " + std::to_string(cfg.heads));
  }
  if (params.w_q.size() != cfg.heads || params.w_k.size() != cfg.heads ||
      params.w_v.size() != cfg.heads) {
    throw ConfigError("multi_head: expected " + std::to_string(cfg.heads) + " head projections");
  }
  AttentionConfig head_cfg = cfg;
  head_cfg.d_k = d_model / cfg.heads;

  MultiHeadResult res;
  std::vector<ComplexMatrix> outs;
  for (std::size_t h = 0; h < cfg.heads; ++h) {
    auto tr = holographic_attention(matmul(x, params.w_q[h]), matmul(x, params.w_k[h]),
                                    matmul(x, params.w_v[h]), head_cfg);
    outs.push_back(tr.output);
    res.traces.push_back(std::move(tr));
  }
  res.output = matmul(concat_cols(outs), params.w_o);
  return res;
}

}  // namespace holo
