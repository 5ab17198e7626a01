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

#ifndef LAT_DECODE_HPP_
#define LAT_DECODE_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "lat/config.hpp"
#include "lat/model.hpp"

namespace lat {

struct DecodeConfig {
  enum class Mode { kGreedy, kBeam };
  std::size_t beam_size = 8;
  std::size_t max_symbols_per_frame = 4;
  Mode mode = Mode::kBeam;

  void Validate() const;
  static DecodeConfig FromConfig(const KeyValueConfig& cfg);
};

struct Hypothesis {
  std::vector<int> tokens;         // no blanks
  std::vector<std::size_t> frames; // emission frame of each token
  TextState le_state;
  double log_prob = 0.0;
  std::size_t last_frame = 0;
};

// Summary of how far ahead the lookahead windows reached, in frames.
struct HorizonStats {
  double mean = 0.0;
  std::size_t max = 0;
  std::size_t padded_rows = 0;  // rows that ran into the end of input
};

struct DecodeOutput {
  std::vector<Hypothesis> hypotheses;  // best first
  HorizonStats horizon;
};

// Frame-synchronous greedy search. A hypothesis scores the blank that closes
// each frame, including the forced one after max_symbols_per_frame labels, so
// log_prob is the log-probability of a single lattice path.
DecodeOutput GreedyDecode(const TransducerModel& model, const Tensor& x,
                          bool lookahead_enabled, const DecodeConfig& cfg);

// Breadth-synchronous beam search. Within a frame, candidates from every
// expansion round compete for the same `beam_size` slots; hypotheses that
// close the frame with identical labels are merged by log-add. With
// beam_size == 1 this is exactly GreedyDecode. The greedy path is always kept
// as a candidate, so the best score never falls below it.
DecodeOutput BeamDecode(const TransducerModel& model, const Tensor& x,
                        const DecodeConfig& cfg, bool lookahead_enabled);

// Dispatches on cfg.mode.
DecodeOutput Decode(const TransducerModel& model, const Tensor& x, const DecodeConfig& cfg);

}  // namespace lat

#endif  // LAT_DECODE_HPP_
