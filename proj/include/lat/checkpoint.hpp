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

#ifndef LAT_CHECKPOINT_HPP_
#define LAT_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lat/tensor.hpp"

namespace lat {

// Layout (all integers little-endian):
//   magic "LATCKPT\0" | u32 version | u32 count |
//   count x { u32 name_len | name bytes | u32 rank | rank x u64 dim |
//             prod(dims) x f64 }
inline constexpr char kCheckpointMagic[8] = {'L', 'A', 'T', 'C', 'K', 'P', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void WriteCheckpoint(const std::filesystem::path& path, const NamedTensors& tensors);
NamedTensors ReadCheckpoint(const std::filesystem::path& path);

}  // namespace lat

#endif  // LAT_CHECKPOINT_HPP_
