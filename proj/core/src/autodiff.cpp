#include "holo/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace holo::ad {

// ---- ParamStore -------------------------------------------------------------

ComplexMatrix& ParamStore::add(const std::string& name, ComplexMatrix init) {
  if (contains(name)) throw ConfigError("ParamStore: duplicate parameter '" + name + "'");
  Param p;
  p.name = name;
  p.grad = ComplexMatrix(init.rows(), init.cols());
  p.m = ComplexMatrix(init.rows(), init.cols());
  p.v = ComplexMatrix(init.rows(), init.cols());
  p.value = std::move(init);
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return params_.back().value;
}

Param& ParamStore::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("ParamStore: unknown parameter '" + name + "'");
  return params_[it->second];
}

const Param& ParamStore::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("ParamStore: unknown parameter '" + name + "'");
  return params_[it->second];
}

std::size_t ParamStore::real_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += 2 * p.value.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) std::fill(p.grad.values().begin(), p.grad.values().end(), cplx{});
}

// ---- Var / Tape ---------------------------------------------------------------

const ComplexMatrix& Var::value() const {
  if (!tape) throw InternalError("Var: unrecorded tensor");
  tape->check(*this);
  return tape->value(id);
}

const ComplexMatrix& Var::grad() const {
  if (!tape) throw InternalError("Var: unrecorded tensor");
  tape->check(*this);
  return tape->grad(id);
}

double Var::scalar() const {
  const auto& v = value();
  if (v.rows() != 1 || v.cols() != 1) {
    throw DimensionError("Var::scalar on " + shape_str(v) + " tensor");
  }
  return v(0, 0).real();
}

void Tape::check(Var v) const {
  if (v.tape != this) throw InternalError("tape: tensor recorded on a different tape");
  if (v.id >= nodes_.size()) throw InternalError("tape: unrecorded tensor id");
}

Var Tape::constant(ComplexMatrix value, std::string label) {
  Node n;
  n.value = std::move(value);
  n.label = std::move(label);
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::leaf(ComplexMatrix value, std::string label) {
  Node n;
  n.value = std::move(value);
  n.label = std::move(label);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::param(const ParamStore& store, const std::string& name) {
  Var v = leaf(store.at(name).value, name);
  nodes_.back().param_name = name;
  return v;
}

Var Tape::record(ComplexMatrix value, std::vector<Var> inputs, BackwardFn backward,
                 std::string label) {
  Node n;
  n.value = std::move(value);
  n.label = std::move(label);
  n.backward = std::move(backward);
  for (const auto& in : inputs) {
    check(in);
    n.inputs.push_back(in.id);
    n.requires_grad = n.requires_grad || nodes_[in.id].requires_grad;
  }
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

ComplexMatrix& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_.at(id);
  if (n.grad.size() != n.value.size() || !n.grad.same_shape(n.value)) {
    n.grad = ComplexMatrix(n.value.rows(), n.value.cols());
  }
  return n.grad;
}

void Tape::backward(Var loss) {
  check(loss);
  const auto& lv = nodes_[loss.id].value;
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw InternalError("backward: loss must be 1x1, got " + shape_str(lv));
  }
  for (auto& n : nodes_) n.grad = ComplexMatrix();
  grad_buffer(loss.id)(0, 0) = {1.0, 0.0};
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requires_grad || !n.backward || n.grad.empty()) continue;
    for (auto in : n.inputs) {
      if (in >= id) throw InternalError("backward: graph cycle at node '" + n.label + "'");
    }
    n.backward(*this, id);
  }
}

void Tape::accumulate_into(ParamStore& store, double s) const {
  for (const auto& n : nodes_) {
    if (n.param_name.empty() || n.grad.empty()) continue;
    auto& g = store.at(n.param_name).grad;
    if (!g.same_shape(n.grad)) {
      throw InternalError("accumulate_into: shape drift for '" + n.param_name + "'");
    }
    for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] += s * n.grad.data()[i];
  }
}

std::optional<std::string> Tape::first_non_finite() const {
  for (const auto& n : nodes_) {
    if (!all_finite(n.value)) return n.label;
  }
  return std::nullopt;
}

// ---- ops --------------------------------------------------------------------

namespace {

bool wants_grad(const Tape& t, std::size_t id) { return t.requires_grad(id); }

void accumulate(ComplexMatrix& dst, const ComplexMatrix& src, cplx s = {1.0, 0.0}) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst.data()[i] += s * src.data()[i];
}

inline double sign_or_zero(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = *a.tape;
  return t.record(
      holo::matmul(a.value(), b.value()), {a, b},
      [](Tape& t, std::size_t self) {
        const auto ia = t.inputs(self)[0], ib = t.inputs(self)[1];
        const auto& g = t.grad(self);
        // C = A B: dA = G B^H, dB = A^H G.
        if (wants_grad(t, ia)) accumulate(t.grad_buffer(ia), holo::matmul_nh(g, t.value(ib)));
        if (wants_grad(t, ib)) accumulate(t.grad_buffer(ib), holo::matmul_hn(t.value(ia), g));
      },
      "matmul");
}

Var add(Var a, Var b) {
  Tape& t = *a.tape;
  return t.record(
      holo::add(a.value(), b.value()), {a, b},
      [](Tape& t, std::size_t self) {
        for (auto in : t.inputs(self)) accumulate(t.grad_buffer(in), t.grad(self));
      },
      "add");
}

Var add_row(Var a, Var bias) {
  const auto& av = a.value();
  const auto& bv = bias.value();
  if (bv.rows() != 1 || bv.cols() != av.cols()) {
    throw DimensionError("add_row: bias " + shape_str(bv) + " for " + shape_str(av));
  }
  ComplexMatrix out = av;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += bv(0, c);
  return a.tape->record(
      std::move(out), {a, bias},
      [](Tape& t, std::size_t self) {
        const auto& g = t.grad(self);
        accumulate(t.grad_buffer(t.inputs(self)[0]), g);
        auto& gb = t.grad_buffer(t.inputs(self)[1]);
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) gb(0, c) += g(r, c);
      },
      "add_row");
}

Var scale(Var a, double s) {
  return a.tape->record(
      holo::scale(a.value(), s), {a},
      [s](Tape& t, std::size_t self) {
        accumulate(t.grad_buffer(t.inputs(self)[0]), t.grad(self), s);
      },
      "scale");
}

Var mask_mul(Var a, const RealMatrix& mask) {
  const auto& av = a.value();
  if (!mask.same_shape(RealMatrix(av.rows(), av.cols()))) {
    throw DimensionError("mask_mul: mask " + shape_str(mask) + " for " + shape_str(av));
  }
  ComplexMatrix out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= mask.data()[i];
  return a.tape->record(
      std::move(out), {a},
      [mask](Tape& t, std::size_t self) {
        const auto& g = t.grad(self);
        auto& ga = t.grad_buffer(t.inputs(self)[0]);
        for (std::size_t i = 0; i < g.size(); ++i) ga.data()[i] += mask.data()[i] * g.data()[i];
      },
      "dropout");
}

Var layer_norm(Var z, Var gain, Var bias, double eps) {
  const auto& zv = z.value();
  const auto& gv = gain.value();
  const auto& bv = bias.value();
  if (gv.rows() != 1 || bv.rows() != 1) throw DimensionError("layer_norm: gain/bias must be 1 x d");
  auto out = complex_layer_norm(zv, gv.row(0), bv.row(0), eps);
  return z.tape->record(
      std::move(out), {z, gain, bias},
      [eps](Tape& t, std::size_t self) {
        const auto iz = t.inputs(self)[0], ig = t.inputs(self)[1], ib = t.inputs(self)[2];
        const auto& zv = t.value(iz);
        const auto& g = t.value(ig);
        const auto& gy = t.grad(self);
        auto& gz = t.grad_buffer(iz);
        auto& gg = t.grad_buffer(ig);
        auto& gb = t.grad_buffer(ib);
        const std::size_t d = zv.cols();
        const double dd = static_cast<double>(d);
        std::vector<cplx> c(d), gn(d), gc(d);
        for (std::size_t r = 0; r < zv.rows(); ++r) {
          cplx mu{};
          for (std::size_t k = 0; k < d; ++k) mu += zv(r, k);
          mu /= dd;
          double ms = 0.0;
          for (std::size_t k = 0; k < d; ++k) {
            c[k] = zv(r, k) - mu;
            ms += std::norm(c[k]);
          }
          const double sigma = std::sqrt(ms / dd + eps);
          double g_sigma = 0.0;
          for (std::size_t k = 0; k < d; ++k) {
            const cplx n = c[k] / sigma;
            gg(0, k) += gy(r, k) * std::conj(n);
            gb(0, k) += gy(r, k);
            gn[k] = gy(r, k) * std::conj(g(0, k));
            g_sigma -= (std::conj(gn[k]) * c[k]).real() / (sigma * sigma);
          }
          const double coef = g_sigma / (sigma * dd);
          cplx mean_gc{};
          for (std::size_t k = 0; k < d; ++k) {
            gc[k] = gn[k] / sigma + coef * c[k];
            mean_gc += gc[k];
          }
          mean_gc /= dd;
          for (std::size_t k = 0; k < d; ++k) gz(r, k) += gc[k] - mean_gc;
        }
      },
      "layer_norm");
}

Var split_relu(Var a) {
  const auto& av = a.value();
  ComplexMatrix out(av.rows(), av.cols());
  double kink = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const cplx z = av.data()[i];
    out.data()[i] = {std::max(z.real(), 0.0), std::max(z.imag(), 0.0)};
    kink = std::min({kink, std::abs(z.real()), std::abs(z.imag())});
  }
  a.tape->note_kink_distance(kink);
  return a.tape->record(
      std::move(out), {a},
      [](Tape& t, std::size_t self) {
        const auto ia = t.inputs(self)[0];
        const auto& av = t.value(ia);
        const auto& g = t.grad(self);
        auto& ga = t.grad_buffer(ia);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const cplx z = av.data()[i];
          ga.data()[i] += cplx{z.real() > 0.0 ? g.data()[i].real() : 0.0,
                               z.imag() > 0.0 ? g.data()[i].imag() : 0.0};
        }
      },
      "split_relu");
}

namespace {

// f(r) = tanh(r) / r and f'(r) / r, with series expansions near zero.
inline double tanh_ratio(double r) {
  return r < 1e-4 ? 1.0 - r * r / 3.0 : std::tanh(r) / r;
}
inline double tanh_ratio_slope_over_r(double r) {
  if (r < 1e-4) return -2.0 / 3.0;
  const double th = std::tanh(r);
  const double sech2 = 1.0 - th * th;
  return (sech2 * r - th) / (r * r * r);
}

}  // namespace

Var phase_tanh(Var a) {
  const auto& av = a.value();
  ComplexMatrix out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) {
    const cplx z = av.data()[i];
    out.data()[i] = z * tanh_ratio(std::abs(z));
  }
  return a.tape->record(
      std::move(out), {a},
      [](Tape& t, std::size_t self) {
        const auto ia = t.inputs(self)[0];
        const auto& av = t.value(ia);
        const auto& g = t.grad(self);
        auto& ga = t.grad_buffer(ia);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const cplx z = av.data()[i];
          const double r = std::abs(z);
          const cplx gy = g.data()[i];
          ga.data()[i] += tanh_ratio(r) * gy +
                          ((std::conj(gy) * z).real() * tanh_ratio_slope_over_r(r)) * z;
        }
      },
      "phase_tanh");
}

Var slice_cols(Var a, std::size_t start, std::size_t count) {
  const auto& av = a.value();
  if (start + count > av.cols()) {
    throw DimensionError("slice_cols: [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") of " + shape_str(av));
  }
  ComplexMatrix out(av.rows(), count);
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < count; ++c) out(r, c) = av(r, start + c);
  return a.tape->record(
      std::move(out), {a},
      [start](Tape& t, std::size_t self) {
        const auto& g = t.grad(self);
        auto& ga = t.grad_buffer(t.inputs(self)[0]);
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) ga(r, start + c) += g(r, c);
      },
      "slice_cols");
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw DimensionError("concat_cols: row mismatch");
    cols += p.cols();
  }
  ComplexMatrix out(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    const auto& pv = p.value();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < pv.cols(); ++c) out(r, off + c) = pv(r, c);
    off += pv.cols();
  }
  return parts.front().tape->record(
      std::move(out), parts,
      [](Tape& t, std::size_t self) {
        const auto& g = t.grad(self);
        std::size_t off = 0;
        for (auto in : t.inputs(self)) {
          auto& gi = t.grad_buffer(in);
          for (std::size_t r = 0; r < gi.rows(); ++r)
            for (std::size_t c = 0; c < gi.cols(); ++c) gi(r, c) += g(r, off + c);
          off += gi.cols();
        }
      },
      "concat_cols");
}

Var mean_rows(Var a) {
  const auto& av = a.value();
  if (av.rows() == 0) throw DimensionError("mean_rows: empty input");
  ComplexMatrix out(1, av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < av.cols(); ++c) out(0, c) += av(r, c);
  for (auto& z : out.values()) z /= static_cast<double>(av.rows());
  return a.tape->record(
      std::move(out), {a},
      [](Tape& t, std::size_t self) {
        const auto& g = t.grad(self);
        auto& ga = t.grad_buffer(t.inputs(self)[0]);
        const double inv = 1.0 / static_cast<double>(ga.rows());
        for (std::size_t r = 0; r < ga.rows(); ++r)
          for (std::size_t c = 0; c < ga.cols(); ++c) ga(r, c) += inv * g(0, c);
      },
      "mean_rows");
}

Var re_im_concat(Var a) {
  const auto& av = a.value();
  if (av.rows() != 1) throw DimensionError("re_im_concat: expects a single row");
  const std::size_t n = av.cols();
  ComplexMatrix out(1, 2 * n);
  for (std::size_t c = 0; c < n; ++c) {
    out(0, c) = av(0, c).real();
    out(0, n + c) = av(0, c).imag();
  }
  return a.tape->record(
      std::move(out), {a},
      [n](Tape& t, std::size_t self) {
        const auto& g = t.grad(self);
        auto& ga = t.grad_buffer(t.inputs(self)[0]);
        for (std::size_t c = 0; c < n; ++c) ga(0, c) += cplx{g(0, c).real(), g(0, n + c).real()};
      },
      "re_im_concat");
}

Var reshape(Var a, std::size_t rows, std::size_t cols) {
  const auto& av = a.value();
  if (rows * cols != av.size()) {
    throw DimensionError("reshape: " + shape_str(av) + " -> " + shape_str(rows, cols));
  }
  return a.tape->record(
      ComplexMatrix(rows, cols, av.values()), {a},
      [](Tape& t, std::size_t self) {
        const auto& g = t.grad(self);
        auto& ga = t.grad_buffer(t.inputs(self)[0]);
        for (std::size_t i = 0; i < g.size(); ++i) ga.data()[i] += g.data()[i];
      },
      "reshape");
}

Var attention_head(Var q, Var k, Var v, const AttentionConfig& cfg, const RealMatrix* weight_mask,
                   AttentionTrace* trace_out) {
  auto trace = std::make_shared<AttentionTrace>(
      holographic_attention(q.value(), k.value(), v.value(), cfg, weight_mask));
  if (!cfg.ablate_phase_decay) {
    double kink = std::numeric_limits<double>::infinity();
    for (double phi : trace->delta_phi.values()) {
      const double m = std::abs(phi);
      kink = std::min({kink, m, kPi - m});
    }
    q.tape->note_kink_distance(kink);
  }
  if (trace_out) *trace_out = *trace;
  std::shared_ptr<RealMatrix> mask;
  if (weight_mask) mask = std::make_shared<RealMatrix>(*weight_mask);
  ComplexMatrix out = trace->output;
  return q.tape->record(
      std::move(out), {q, k, v},
      [trace, mask, cfg](Tape& t, std::size_t self) {
        const auto iq = t.inputs(self)[0], ik = t.inputs(self)[1], iv = t.inputs(self)[2];
        auto g = holographic_attention_backward(t.value(iq), t.value(ik), t.value(iv), *trace,
                                                t.grad(self), cfg, mask.get());
        accumulate(t.grad_buffer(iq), g.dq);
        accumulate(t.grad_buffer(ik), g.dk);
        accumulate(t.grad_buffer(iv), g.dv);
      },
      "attention");
}

// ---- losses -------------------------------------------------------------------

Var mean_squared_error(Var pred, const ComplexMatrix& target) {
  const auto& pv = pred.value();
  if (!pv.same_shape(target)) {
    throw DimensionError("mean_squared_error: " + shape_str(pv) + " vs " + shape_str(target));
  }
  if (pv.empty()) throw DimensionError("mean_squared_error: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const cplx d = pv.data()[i] - target.data()[i];
    s += d.real() * d.real() + d.imag() * d.imag();
  }
  const double n = static_cast<double>(pv.size());
  return pred.tape->record(
      ComplexMatrix(1, 1, cplx{s / n, 0.0}), {pred},
      [target, n](Tape& t, std::size_t self) {
        const double g = t.grad(self)(0, 0).real();
        const auto ip = t.inputs(self)[0];
        const auto& pv = t.value(ip);
        auto& gp = t.grad_buffer(ip);
        for (std::size_t i = 0; i < pv.size(); ++i)
          gp.data()[i] += (2.0 * g / n) * (pv.data()[i] - target.data()[i]);
      },
      "mse");
}

Var cross_entropy(Var logits, std::size_t label) {
  const auto& lv = logits.value();
  if (lv.rows() != 1) throw DimensionError("cross_entropy: logits must be 1 x K");
  const std::size_t k = lv.cols();
  if (label >= k) {
    throw DataError("cross_entropy: label " + std::to_string(label) + " out of range for " +
                    std::to_string(k) + " classes");
  }
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) mx = std::max(mx, lv(0, c).real());
  double sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) sum += std::exp(lv(0, c).real() - mx);
  const double lse = mx + std::log(sum);
  const double loss = lse - lv(0, label).real();
  return logits.tape->record(
      ComplexMatrix(1, 1, cplx{loss, 0.0}), {logits},
      [label, lse](Tape& t, std::size_t self) {
        const double g = t.grad(self)(0, 0).real();
        const auto il = t.inputs(self)[0];
        const auto& lv = t.value(il);
        auto& gl = t.grad_buffer(il);
        for (std::size_t c = 0; c < lv.cols(); ++c) {
          const double p = std::exp(lv(0, c).real() - lse);
          gl(0, c) += g * (p - (c == label ? 1.0 : 0.0));
        }
      },
      "cross_entropy");
}

Var phase_smoothness(Var z) {
  const auto& zv = z.value();
  const std::size_t rows = zv.rows(), d = zv.cols();
  if (rows < 2 || d == 0) {
    return z.tape->record(ComplexMatrix(1, 1), {z}, [](Tape&, std::size_t) {}, "phase_reg");
  }
  const double n = static_cast<double>((rows - 1) * d);
  double s = 0.0;
  double kink = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r + 1 < rows; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double dphi = wrap_angle(angle(zv(r + 1, c)) - angle(zv(r, c)));
      s += std::abs(dphi);
      kink = std::min({kink, std::abs(dphi), kPi - std::abs(dphi)});
    }
  }
  z.tape->note_kink_distance(kink);
  return z.tape->record(
      ComplexMatrix(1, 1, cplx{s / n, 0.0}), {z},
      [n](Tape& t, std::size_t self) {
        const double g = t.grad(self)(0, 0).real();
        const auto iz = t.inputs(self)[0];
        const auto& zv = t.value(iz);
        auto& gz = t.grad_buffer(iz);
        RealMatrix g_phi(zv.rows(), zv.cols());
        for (std::size_t r = 0; r + 1 < zv.rows(); ++r) {
          for (std::size_t c = 0; c < zv.cols(); ++c) {
            const double dphi = wrap_angle(angle(zv(r + 1, c)) - angle(zv(r, c)));
            const double gd = g * sign_or_zero(dphi) / n;
            g_phi(r + 1, c) += gd;
            g_phi(r, c) -= gd;
          }
        }
        for (std::size_t i = 0; i < zv.size(); ++i) {
          const cplx w = zv.data()[i];
          const double mag2 = std::max(std::norm(w), 1e-24);
          gz.data()[i] += g_phi.data()[i] * cplx{-w.imag() / mag2, w.real() / mag2};
        }
      },
      "phase_reg");
}

Var weighted_sum(std::span<const std::pair<double, Var>> terms) {
  if (terms.empty()) throw DimensionError("weighted_sum: no terms");
  double s = 0.0;
  std::vector<Var> inputs;
  std::vector<double> weights;
  for (const auto& [w, v] : terms) {
    s += w * v.scalar();
    inputs.push_back(v);
    weights.push_back(w);
  }
  return terms.front().second.tape->record(
      ComplexMatrix(1, 1, cplx{s, 0.0}), inputs,
      [weights](Tape& t, std::size_t self) {
        const cplx g = t.grad(self)(0, 0);
        const auto& ins = t.inputs(self);
        for (std::size_t i = 0; i < ins.size(); ++i) t.grad_buffer(ins[i])(0, 0) += weights[i] * g;
      },
      "weighted_sum");
}

// ---- finite differences -------------------------------------------------------

std::vector<double> finite_diff(const std::function<double(std::span<const double>)>& f,
                                std::vector<double> x, double h) {
  if (!(h > 0.0)) throw ConfigError("finite_diff: h must be > 0");
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double fp = f(x);
    x[i] = orig - h;
    const double fm = f(x);
    x[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

std::vector<ComplexMatrix> finite_diff(const std::function<double(const ParamStore&)>& f,
                                       ParamStore& params, double h) {
  if (!(h > 0.0)) throw ConfigError("finite_diff: h must be > 0");
  std::vector<ComplexMatrix> out;
  out.reserve(params.params().size());
  for (auto& p : params.params()) {
    ComplexMatrix g(p.value.rows(), p.value.cols());
    double* raw = reinterpret_cast<double*>(p.value.data());
    double* graw = reinterpret_cast<double*>(g.data());
    for (std::size_t i = 0; i < 2 * p.value.size(); ++i) {
      const double orig = raw[i];
      raw[i] = orig + h;
      const double fp = f(params);
      raw[i] = orig - h;
      const double fm = f(params);
      raw[i] = orig;
      graw[i] = (fp - fm) / (2.0 * h);
    }
    out.push_back(std::move(g));
  }
  return out;
}

// ---- Adam -----------------------------------------------------------------------

void adam_step(ParamStore& store, const AdamOptions& opt) {
  store.step += 1;
  const double t = static_cast<double>(store.step);
  const double bc1 = 1.0 - std::pow(opt.beta1, t);
  const double bc2 = 1.0 - std::pow(opt.beta2, t);
  for (auto& p : store.params()) {
    double* theta = reinterpret_cast<double*>(p.value.data());
    const double* grad = reinterpret_cast<const double*>(p.grad.data());
    double* m = reinterpret_cast<double*>(p.m.data());
    double* v = reinterpret_cast<double*>(p.v.data());
    const std::size_t n = 2 * p.value.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double g = grad[i] + opt.weight_decay * theta[i];
      m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * g;
      v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      theta[i] -= opt.lr * mhat / (std::sqrt(vhat) + opt.eps);
    }
  }
}

}  // namespace holo::ad
