// Copyright 2026 The LookAhead Transducer Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Little-endian stream helpers shared by the checkpoint and feature formats.

#ifndef LAT_BINARY_IO_HPP_
#define LAT_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace lat::io {

class TruncatedError : public std::runtime_error {
 public:
  TruncatedError() : std::runtime_error("unexpected end of stream") {}
};

template <typename T>
T ToLittle(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <typename T>
void WriteRaw(std::ostream& out, T v) {
  v = ToLittle(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadRaw(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) throw TruncatedError();
  return ToLittle(v);
}

inline void WriteU32(std::ostream& out, std::uint32_t v) { WriteRaw(out, v); }
inline void WriteU64(std::ostream& out, std::uint64_t v) { WriteRaw(out, v); }
inline std::uint32_t ReadU32(std::istream& in) { return ReadRaw<std::uint32_t>(in); }
inline std::uint64_t ReadU64(std::istream& in) { return ReadRaw<std::uint64_t>(in); }

inline void WriteF64s(std::ostream& out, std::span<const double> values) {
  for (double v : values) WriteRaw(out, std::bit_cast<std::uint64_t>(v));
}

inline std::vector<double> ReadF64s(std::istream& in, std::size_t n) {
  std::vector<double> values(n);
  for (auto& v : values) v = std::bit_cast<double>(ReadRaw<std::uint64_t>(in));
  return values;
}

}  // namespace lat::io

#endif  // LAT_BINARY_IO_HPP_
