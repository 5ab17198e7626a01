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

#include "lat/checkpoint.hpp"

#include <algorithm>
#include <fstream>

#include "lat/binary_io.hpp"

namespace lat {

void WriteCheckpoint(const std::filesystem::path& path, const NamedTensors& tensors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open " + path.string() + " for writing");
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  io::WriteU32(out, kCheckpointVersion);
  io::WriteU32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, tensor] : tensors) {
    io::WriteU32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    io::WriteU32(out, static_cast<std::uint32_t>(tensor.rank()));
    for (std::size_t d : tensor.shape()) io::WriteU64(out, d);
    io::WriteF64s(out, tensor.data());
  }
  if (!out) throw CheckpointError("write failed for " + path.string());
}

NamedTensors ReadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  char magic[sizeof(kCheckpointMagic)];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(magic, magic + sizeof(magic), kCheckpointMagic)) {
    throw CheckpointError(path.string() + " is not a checkpoint (bad magic)");
  }
  try {
    const std::uint32_t version = io::ReadU32(in);
    if (version != kCheckpointVersion) {
      throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t count = io::ReadU32(in);
    NamedTensors tensors;
    tensors.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint32_t name_len = io::ReadU32(in);
      std::string name(name_len, '\0');
      in.read(name.data(), name_len);
      const std::uint32_t rank = io::ReadU32(in);
      Shape shape(rank);
      for (auto& d : shape) d = io::ReadU64(in);
      std::vector<double> values = io::ReadF64s(in, NumElements(shape));
      tensors.emplace_back(std::move(name), Tensor(std::move(shape), std::move(values)));
    }
    return tensors;
  } catch (const io::TruncatedError&) {
    throw CheckpointError("checkpoint " + path.string() + " is truncated");
  }
}

}  // namespace lat
