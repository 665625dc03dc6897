#pragma once

// Dense complex linear algebra used throughout the holographic transformer.
//
// Everything is double precision and row-major. A complex number is
// std::complex<double>; its storage is the (re, im) pair the standard
// guarantees, which lets kernels walk the data as interleaved doubles.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace holo {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Dense row-major matrix. `Matrix<cplx>` is the universal tensor; real
/// matrices carry similarities, scores and attention weights.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                           " != rows*cols " + std::to_string(rows_ * cols_));
    }
  }
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::vector<T>& values() noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  bool same_shape(const Matrix& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using ComplexMatrix = Matrix<cplx>;
using RealMatrix = Matrix<double>;

std::string shape_str(std::size_t rows, std::size_t cols);

template <typename T>
std::string shape_str(const Matrix<T>& m) {
  return shape_str(m.rows(), m.cols());
}

// ---- scalars ---------------------------------------------------------------

/// Principal argument in (-pi, pi]; angle(0) == 0 and -pi is folded to +pi.
double angle(cplx z) noexcept;

/// Maps any finite angle into (-pi, pi].
double wrap_angle(double a) noexcept;

inline double magnitude(cplx z) noexcept { return std::abs(z); }

/// Sum_k a_k * conj(b_k). Conjugation sits on the second argument.
cplx cdot(std::span<const cplx> a, std::span<const cplx> b);

double norm(std::span<const cplx> a) noexcept;

// ---- matrix algebra --------------------------------------------------------

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
/// a * b^H without materialising the conjugate transpose.
ComplexMatrix matmul_nh(const ComplexMatrix& a, const ComplexMatrix& b);
/// a^H * b.
ComplexMatrix matmul_hn(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix conj_transpose(const ComplexMatrix& a);
ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix sub(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix scale(const ComplexMatrix& a, cplx s);
ComplexMatrix to_complex(const RealMatrix& a);
RealMatrix real_part(const ComplexMatrix& a);
RealMatrix imag_part(const ComplexMatrix& a);

/// Row-wise Euclidean norms.
std::vector<double> row_norms(const ComplexMatrix& a);

double max_abs(const ComplexMatrix& a) noexcept;
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
double max_abs_diff(const RealMatrix& a, const RealMatrix& b);
bool all_finite(const ComplexMatrix& a) noexcept;
bool all_finite(const RealMatrix& a) noexcept;

/// Numerically stable softmax over each row.
RealMatrix row_softmax(const RealMatrix& w);

/// Per-row complex layer normalisation:
///   z' = gain * (z - mu) / sqrt(mean|z - mu|^2 + eps) + bias
ComplexMatrix complex_layer_norm(const ComplexMatrix& z, std::span<const cplx> gain,
                                 std::span<const cplx> bias, double eps);

}  // namespace holo
