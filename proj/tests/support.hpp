#pragma once

// Helpers shared by the test binaries: seeded random tensors and the naive
// scalar-loop oracles that the vectorised kernels are compared against.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "holo/attention.hpp"
#include "holo/ctensor.hpp"

namespace holo::test {

inline ComplexMatrix random_complex(std::size_t r, std::size_t c, std::mt19937_64& rng,
                                    double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  ComplexMatrix m(r, c);
  for (auto& z : m.values()) z = {nd(rng), nd(rng)};
  return m;
}

inline RealMatrix random_real(std::size_t r, std::size_t c, std::mt19937_64& rng,
                              double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  RealMatrix m(r, c);
  for (auto& x : m.values()) x = u(rng);
  return m;
}

inline ComplexMatrix naive_matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  }
  return c;
}

/// Holographic attention written as scalar loops straight from the
/// definitions, sharing no code with the library kernels.
inline ComplexMatrix naive_attention(const ComplexMatrix& q, const ComplexMatrix& k,
                                     const ComplexMatrix& v, double alpha, double eps,
                                     bool phase_decay = true, bool coherent = true) {
  const std::size_t t = q.rows(), dk = q.cols();
  ComplexMatrix h(t, v.cols());
  for (std::size_t i = 0; i < t; ++i) {
    std::vector<double> w(t), dphi(t);
    double qn = 0.0;
    for (std::size_t c = 0; c < dk; ++c) qn += std::norm(q(i, c));
    qn = std::sqrt(qn);
    for (std::size_t j = 0; j < t; ++j) {
      double sre = 0.0, sim_ = 0.0, kn = 0.0;
      for (std::size_t c = 0; c < dk; ++c) {
        const double a = q(i, c).real(), b = q(i, c).imag();
        const double x = k(j, c).real(), y = k(j, c).imag();
        sre += a * x + b * y;   // Re(q conj(k))
        sim_ += b * x - a * y;  // Im(q conj(k))
        kn += x * x + y * y;
      }
      kn = std::sqrt(kn);
      double phi = (sre == 0.0 && sim_ == 0.0) ? 0.0 : std::atan2(sim_, sre);
      if (phi <= -M_PI) phi += 2.0 * M_PI;
      dphi[j] = phi;
      const double sim = sre / (qn * kn + eps);
      w[j] = sim / std::sqrt(static_cast<double>(dk)) *
             (phase_decay ? std::exp(-alpha * std::fabs(phi)) : 1.0);
    }
    double mx = w[0];
    for (double x : w) mx = std::max(mx, x);
    double z = 0.0;
    for (double& x : w) {
      x = std::exp(x - mx);
      z += x;
    }
    for (std::size_t j = 0; j < t; ++j) {
      const double a = w[j] / z;
      for (std::size_t c = 0; c < v.cols(); ++c) {
        const cplx rot = coherent ? cplx{std::cos(dphi[j]), std::sin(dphi[j])} : cplx{1.0, 0.0};
        h(i, c) += a * v(j, c) * rot;
      }
    }
  }
  return h;
}

}  // namespace holo::test
