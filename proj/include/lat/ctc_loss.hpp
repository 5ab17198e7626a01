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


// Frame-level alignment loss over per-frame distributions (T x V): sums the
// probabilities of every length-T frame path that collapses to the labels
// once repeats are merged and blanks removed.

#ifndef LAT_CTC_LOSS_HPP_
#define LAT_CTC_LOSS_HPP_

#include <span>
#include <vector>

#include "lat/tensor.hpp"

namespace lat {

struct CtcResult {
  double loss = 0.0;         // -log P(y | x)
  std::vector<double> grad;  // d loss / d raw logits, T x V
};

// Throws DimensionError for bad shapes or labels and when no path of T frames
// can spell the labels.
CtcResult ComputeCtcLoss(std::span<const double> logits, std::size_t frames, std::size_t vocab,
                         std::span<const int> labels);

// Taped form over T x V raw logits.
Tensor CtcLoss(const Tensor& frame_logits, std::span<const int> labels);

}  // namespace lat

#endif  // LAT_CTC_LOSS_HPP_
