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

// Transducer building blocks: acoustic encoder, text encoder and the additive
// joint network.

#ifndef LAT_NN_HPP_
#define LAT_NN_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lat/checkpoint.hpp"
#include "lat/random.hpp"
#include "lat/tensor.hpp"

namespace lat {

inline constexpr int kBlankId = 0;
inline constexpr const char* kBlankToken = "<b>";

class Vocabulary {
 public:
  Vocabulary() = default;
  // `tokens[0]` must be the blank literal and no token may repeat.
  explicit Vocabulary(std::vector<std::string> tokens);

  static Vocabulary Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  std::size_t size() const { return tokens_.size(); }
  int blank_id() const { return kBlankId; }
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  // Throws std::out_of_range for unknown tokens.
  int id(const std::string& token) const;
  bool contains(const std::string& token) const { return index_.count(token) > 0; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Ordered, named set of trainable leaves.
class Parameters {
 public:
  Tensor& Add(const std::string& name, Tensor value);
  Tensor& Get(const std::string& name);
  const Tensor& Get(const std::string& name) const;
  bool Contains(const std::string& name) const;

  const NamedTensors& entries() const { return entries_; }
  NamedTensors& entries() { return entries_; }
  std::size_t Count() const;  // total scalar count
  void ZeroGrad();
  // Copies values by name; every parameter must be present with a matching
  // shape.
  void Assign(const NamedTensors& source);

 private:
  NamedTensors entries_;
};

// Initializers. `fan_in` scales the uniform range to +-1/sqrt(fan_in).
Tensor UniformInit(Shape shape, std::size_t fan_in, Rng& rng);

struct LstmState {
  Tensor h;  // 1 x D
  Tensor c;  // 1 x D
};

// Single-layer LSTM, gate order (input, forget, cell, output).
class Lstm {
 public:
  Lstm() = default;
  Lstm(Parameters& params, const std::string& prefix, std::size_t input_dim,
       std::size_t hidden_dim, Rng& rng);

  std::size_t hidden_dim() const { return hidden_dim_; }
  LstmState ZeroState() const;
  // x W_in + b for every row of x (N x input_dim).
  Tensor InputProjection(const Tensor& x) const;
  // One recurrence step from a projected input row (1 x 4D).
  LstmState Step(const Tensor& projected_row, const LstmState& state) const;
  // Runs over all rows of x, returning the N x D hidden outputs.
  Tensor Run(const Tensor& x) const;

 private:
  std::size_t hidden_dim_ = 0;
  Tensor w_in_, w_rec_, bias_;
};

struct EncoderConfig {
  std::size_t feat_dim = 13;
  std::size_t vocab_size = 0;
  std::size_t ae_dim = 32;
  std::size_t ae_layers = 1;
  bool causal = true;
  std::size_t downsample = 1;  // 1 or 2
  std::size_t le_embed_dim = 16;
  std::size_t le_dim = 32;
  std::size_t joint_dim = 32;

  std::size_t acoustic_output_dim() const { return causal ? ae_dim : 2 * ae_dim; }
  void Validate() const;
};

// Recurrent acoustic encoder. In causal mode row t of the output only depends
// on frames <= t * downsample; otherwise each layer is bidirectional.
class AcousticEncoder {
 public:
  AcousticEncoder() = default;
  AcousticEncoder(Parameters& params, const EncoderConfig& cfg, Rng& rng);

  // x: T x feat_dim -> T' x output_dim, T' = ceil(T / downsample).
  Tensor Encode(const Tensor& x) const;
  std::size_t output_dim() const { return output_dim_; }

 private:
  EncoderConfig cfg_;
  std::size_t output_dim_ = 0;
  std::vector<Lstm> forward_;
  std::vector<Lstm> backward_;
};

// Recurrent state of the text encoder after consuming a prefix, together with
// its output row g_u.
struct TextState {
  LstmState lstm;
  Tensor output;  // 1 x le_dim
};

// Autoregressive text encoder. The blank id doubles as the start symbol, so
// row 0 of Encode() is the state before any label has been consumed.
class TextEncoder {
 public:
  TextEncoder() = default;
  TextEncoder(Parameters& params, const EncoderConfig& cfg, Rng& rng);

  TextState Start() const;
  TextState Step(const TextState& state, int token) const;
  // y: U non-blank ids -> (U + 1) x le_dim.
  Tensor Encode(std::span<const int> tokens) const;
  std::size_t output_dim() const { return lstm_.hidden_dim(); }

 private:
  std::size_t vocab_size_ = 0;
  Tensor embedding_;
  Lstm lstm_;
};

// logits = tanh(h Wa + ba + g Wg + bg) Wo + bo
class JointNetwork {
 public:
  JointNetwork() = default;
  JointNetwork(Parameters& params, const EncoderConfig& cfg, Rng& rng);

  // N x D_ae -> N x J
  Tensor ProjectAcoustic(const Tensor& h) const;
  // N x D_le -> N x J
  Tensor ProjectText(const Tensor& g) const;
  // Applies tanh and the output layer to summed projections (N x J -> N x V).
  Tensor Output(const Tensor& summed) const;

  // Single cell: h_t (1 x D_ae), g (1 x D_le) -> 1 x V logits.
  Tensor Logits(const Tensor& h_row, const Tensor& g_row) const;
  // Full lattice from h (T x D_ae) and g ((U+1) x D_le): T x (U+1) x V.
  Tensor Lattice(const Tensor& h, const Tensor& g) const;
  // Lattice from a per-frame text encoding g_hat (T x (U+1) x D_le).
  Tensor ConditionedLattice(const Tensor& h, const Tensor& g_hat) const;
  // Joint output with a zero text encoding, one row per frame: T x V.
  Tensor ImplicitAcousticLogits(const Tensor& h) const;

  std::size_t text_dim() const { return text_dim_; }
  std::size_t acoustic_dim() const { return acoustic_dim_; }

 private:
  std::size_t acoustic_dim_ = 0, text_dim_ = 0, joint_dim_ = 0, vocab_size_ = 0;
  Tensor ae_proj_, ae_bias_, le_proj_, le_bias_, out_proj_, out_bias_;
};

// Adds a 1 x N bias row to every row of an M x N matrix.
Tensor AddBias(const Tensor& x, const Tensor& bias);

}  // namespace lat

#endif  // LAT_NN_HPP_
