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

#ifndef LAT_MODEL_HPP_
#define LAT_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <span>

#include "lat/config.hpp"
#include "lat/lookahead.hpp"
#include "lat/nn.hpp"
#include "lat/tensor.hpp"

namespace lat {

struct ModelConfig {
  EncoderConfig encoder;
  LookaheadConfig lookahead;

  // Reads `model.*` and `lookahead.*` keys; vocab_size comes from the
  // vocabulary file.
  static ModelConfig FromConfig(const KeyValueConfig& cfg, std::size_t vocab_size);
};

// Acoustic encoder, text encoder, joint network and (when enabled) the
// lookahead conditioner, all backed by one parameter set.
class TransducerModel {
 public:
  TransducerModel(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  Parameters& parameters() { return params_; }
  const Parameters& parameters() const { return params_; }

  const AcousticEncoder& acoustic() const { return acoustic_; }
  const TextEncoder& text() const { return text_; }
  const JointNetwork& joint() const { return joint_; }
  bool lookahead_enabled() const { return cfg_.lookahead.enabled; }
  // Throws std::logic_error when lookahead is disabled.
  const LookaheadConditioner& conditioner() const;

  // Lookahead windows for an acoustic encoding, honoring the configured w and
  // horizon cap. Padding uses the blank id.
  LookaheadWindow Windows(const Tensor& h) const;

 private:
  ModelConfig cfg_;
  Parameters params_;
  AcousticEncoder acoustic_;
  TextEncoder text_;
  JointNetwork joint_;
  LookaheadConditioner conditioner_;
};

// Intermediate values of one training forward pass.
struct ForwardPass {
  Tensor h;                // T' x D_ae
  Tensor g;                // (U+1) x D_le
  Tensor iam_logits;       // T' x V
  LookaheadWindow windows; // empty when lookahead is disabled
  Tensor g_hat;            // T' x (U+1) x D_le, undefined when disabled
  Tensor lattice;          // T' x (U+1) x V
};

ForwardPass RunForward(const TransducerModel& model, const Tensor& x, std::span<const int> y);

struct LossParts {
  Tensor total;             // scalar on the tape
  double transducer = 0.0;  // lookahead (or baseline) lattice term
  double iam = 0.0;         // implicit acoustic model term
};

// total = transducer + lambda_iam * iam.
LossParts CombinedLoss(const TransducerModel& model, const Tensor& x, std::span<const int> y);

}  // namespace lat

#endif  // LAT_MODEL_HPP_
