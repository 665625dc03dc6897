#pragma once

// Little-endian primitives shared by the dataset and checkpoint containers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "holo/ctensor.hpp"

namespace holo::io {

static_assert(std::endian::native == std::endian::little,
              "container readers assume a little-endian host");

inline void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void write_i64(std::ostream& out, std::int64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw DataError("container: unexpected end of file");
  return v;
}
inline std::uint32_t read_u32(std::istream& in) { return read_pod<std::uint32_t>(in); }
inline std::uint64_t read_u64(std::istream& in) { return read_pod<std::uint64_t>(in); }
inline std::int64_t read_i64(std::istream& in) { return read_pod<std::int64_t>(in); }

/// Row-major (re, im) f64 pairs.
inline void write_complex_values(std::ostream& out, const ComplexMatrix& m) {
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(cplx)));
}

inline ComplexMatrix read_complex_values(std::istream& in, std::size_t rows, std::size_t cols) {
  ComplexMatrix m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(cplx)));
  if (!in) throw DataError("container: truncated tensor payload");
  return m;
}

}  // namespace holo::io
