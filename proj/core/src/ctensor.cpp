#include "holo/ctensor.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace holo {

std::string shape_str(std::size_t rows, std::size_t cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

double angle(cplx z) noexcept {
  if (z.real() == 0.0 && z.imag() == 0.0) return 0.0;
  const double a = std::atan2(z.imag(), z.real());
  return a <= -kPi ? kPi : a;
}

double wrap_angle(double a) noexcept {
  if (a > -kPi && a <= kPi) return a;
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  if (r > kPi) r -= 2.0 * kPi;
  return r;
}

cplx cdot(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) {
    throw DimensionError("cdot: length mismatch " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double ar = a[k].real(), ai = a[k].imag();
    const double br = b[k].real(), bi = b[k].imag();
    re += ar * br + ai * bi;
    im += ai * br - ar * bi;
  }
  return {re, im};
}

double norm(std::span<const cplx> a) noexcept {
  double s = 0.0;
  for (const auto& z : a) s += z.real() * z.real() + z.imag() * z.imag();
  return std::sqrt(s);
}

namespace {

inline const double* raw(const ComplexMatrix& m) {
  return reinterpret_cast<const double*>(m.data());
}
inline double* raw(ComplexMatrix& m) { return reinterpret_cast<double*>(m.data()); }

}  // namespace

// The avx2 clone only widens the vectors; no FMA, so every clone rounds identically.
#if defined(__GNUC__) && defined(__x86_64__) && !defined(__clang__)
__attribute__((target_clones("avx2", "default")))
#endif
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + shape_str(a) + " * " + shape_str(b));
  }
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  // Split b into planar re/im so the inner loop runs over contiguous doubles.
  std::unique_ptr<double[]> scratch(new double[2 * k * m + 2 * m]);
  double* br = scratch.get();
  double* bi = br + k * m;
  double* cr = bi + k * m;
  double* ci = cr + m;
  const double* pb = raw(b);
  for (std::size_t i = 0; i < k * m; ++i) {
    br[i] = pb[2 * i];
    bi[i] = pb[2 * i + 1];
  }
  const double* pa = raw(a);
  ComplexMatrix c(n, m);
  double* pc = raw(c);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(cr, cr + m, 0.0);
    std::fill(ci, ci + m, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      const double ar = pa[2 * (i * k + p)], ai = pa[2 * (i * k + p) + 1];
      const double* __restrict__ brow = br + p * m;
      const double* __restrict__ birow = bi + p * m;
      double* __restrict__ r = cr;
      double* __restrict__ im = ci;
      for (std::size_t j = 0; j < m; ++j) {
        r[j] += ar * brow[j] - ai * birow[j];
        im[j] += ar * birow[j] + ai * brow[j];
      }
    }
    double* crow = pc + 2 * i * m;
    for (std::size_t j = 0; j < m; ++j) {
      crow[2 * j] = cr[j];
      crow[2 * j + 1] = ci[j];
    }
  }
  return c;
}

ComplexMatrix matmul_nh(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("matmul_nh: " + shape_str(a) + " * (" + shape_str(b) + ")^H");
  }
  return matmul(a, conj_transpose(b));
}

ComplexMatrix matmul_hn(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("matmul_hn: (" + shape_str(a) + ")^H * " + shape_str(b));
  }
  return matmul(conj_transpose(a), b);
}

ComplexMatrix conj_transpose(const ComplexMatrix& a) {
  ComplexMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
  return t;
}

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.same_shape(b)) throw DimensionError("add: " + shape_str(a) + " vs " + shape_str(b));
  ComplexMatrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

ComplexMatrix sub(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.same_shape(b)) throw DimensionError("sub: " + shape_str(a) + " vs " + shape_str(b));
  ComplexMatrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

ComplexMatrix scale(const ComplexMatrix& a, cplx s) {
  ComplexMatrix c = a;
  for (auto& z : c.values()) z *= s;
  return c;
}

ComplexMatrix to_complex(const RealMatrix& a) {
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = {a.data()[i], 0.0};
  return c;
}

RealMatrix real_part(const ComplexMatrix& a) {
  RealMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) r.data()[i] = a.data()[i].real();
  return r;
}

RealMatrix imag_part(const ComplexMatrix& a) {
  RealMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) r.data()[i] = a.data()[i].imag();
  return r;
}

std::vector<double> row_norms(const ComplexMatrix& a) {
  std::vector<double> n(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) n[i] = norm(a.row(i));
  return n;
}

double max_abs(const ComplexMatrix& a) noexcept {
  double m = 0.0;
  for (const auto& z : a.values()) m = std::max(m, std::abs(z));
  return m;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("max_abs_diff: " + shape_str(a) + " vs " + shape_str(b));
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double max_abs_diff(const RealMatrix& a, const RealMatrix& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("max_abs_diff: " + shape_str(a) + " vs " + shape_str(b));
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

bool all_finite(const ComplexMatrix& a) noexcept {
  return std::all_of(a.values().begin(), a.values().end(), [](cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

bool all_finite(const RealMatrix& a) noexcept {
  return std::all_of(a.values().begin(), a.values().end(),
                     [](double x) { return std::isfinite(x); });
}

RealMatrix row_softmax(const RealMatrix& w) {
  RealMatrix out(w.rows(), w.cols());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    auto in = w.row(i);
    auto o = out.row(i);
    if (in.empty()) continue;
    const double mx = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      o[j] = std::exp(in[j] - mx);
      sum += o[j];
    }
    for (auto& x : o) x /= sum;
  }
  return out;
}

ComplexMatrix complex_layer_norm(const ComplexMatrix& z, std::span<const cplx> gain,
                                 std::span<const cplx> bias, double eps) {
  if (!(eps > 0.0)) throw ConfigError("complex_layer_norm: eps must be > 0");
  if (gain.size() != z.cols() || bias.size() != z.cols()) {
    throw DimensionError("complex_layer_norm: gain/bias length must equal cols " +
                         std::to_string(z.cols()));
  }
  ComplexMatrix out(z.rows(), z.cols());
  const double d = static_cast<double>(z.cols());
  for (std::size_t t = 0; t < z.rows(); ++t) {
    auto row = z.row(t);
    cplx mu{0.0, 0.0};
    for (const auto& v : row) mu += v;
    mu /= d;
    double ms = 0.0;
    for (const auto& v : row) ms += std::norm(v - mu);
    const double sigma = std::sqrt(ms / d + eps);
    auto o = out.row(t);
    for (std::size_t k = 0; k < row.size(); ++k) o[k] = gain[k] * ((row[k] - mu) / sigma) + bias[k];
  }
  return out;
}

}  // namespace holo
