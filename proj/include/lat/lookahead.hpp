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

// Acoustic lookahead for the text encoder.
//
// The implicit acoustic model (IAM) is the joint network evaluated with a
// zero text encoding. Its per-frame argmax gives a greedy path; for every
// frame t the first w non-blank tokens of that path at positions >= t form the
// lookahead window. A small residual feed-forward network folds each window
// into the text encoding, giving one conditioned encoding per (t, u).

#ifndef LAT_LOOKAHEAD_HPP_
#define LAT_LOOKAHEAD_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lat/nn.hpp"
#include "lat/tensor.hpp"

namespace lat {

// One token id per acoustic frame, blank allowed.
struct IamGreedyPath {
  std::vector<int> tokens;
};

struct LookaheadWindow {
  std::size_t width = 0;          // w
  std::vector<int> ids;           // frames x width, padded with pad_id
  std::vector<std::size_t> real;  // number of non-pad entries per row
  // Frames between t and the last frame the row depends on: the position of
  // the w-th non-blank, or the final frame when the row is padded.
  std::vector<std::size_t> horizon;

  std::size_t frames() const { return real.size(); }
  std::span<const int> row(std::size_t t) const {
    return std::span<const int>(ids).subspan(t * width, width);
  }
};

// Argmax over per-frame logits (T x V), lowest id wins ties.
IamGreedyPath IamGreedy(const Tensor& frame_logits);
IamGreedyPath IamGreedy(const JointNetwork& joint, const Tensor& h);

// Row t lists the first `w` non-blank entries of `path` at positions >= t.
// With `max_horizon` set, only positions t .. t + max_horizon are scanned.
// Throws std::invalid_argument when w == 0.
LookaheadWindow ExtractWindows(const IamGreedyPath& path, std::size_t w, int pad_id,
                               std::optional<std::size_t> max_horizon = std::nullopt);

// Marginalization used to supervise the implicit acoustic model. kTransducer
// runs the transducer lattice with every row set to joint(h_t, 0); kCtc sums
// over frame paths of the same per-frame distribution.
enum class IamObjective { kTransducer, kCtc };

struct LookaheadConfig {
  bool enabled = false;
  std::size_t w = 3;
  std::size_t embed_dim = 8;
  std::size_t hidden_dim = 32;
  double lambda_iam = 1.0;
  IamObjective iam_objective = IamObjective::kTransducer;
  std::optional<std::size_t> max_horizon_frames;
  // Zero-initialize the output layer so conditioning starts as the identity.
  bool zero_init_output = true;
};

// g_hat[t][u] = g[u] + W_o tanh(A g[u] + B [e(win_t,1) ... e(win_t,w)] + b) + b_o
class LookaheadConditioner {
 public:
  LookaheadConditioner() = default;
  LookaheadConditioner(Parameters& params, const LookaheadConfig& cfg, std::size_t vocab_size,
                       std::size_t text_dim, Rng& rng);

  // g: (U+1) x D -> frames x (U+1) x D.
  Tensor Condition(const Tensor& g, const LookaheadWindow& windows) const;
  // One (t, u) cell: g_row (1 x D) with window row t -> 1 x D.
  Tensor ConditionRow(const Tensor& g_row, std::span<const int> window_row) const;
  // Window features for every frame: frames x hidden.
  Tensor WindowFeatures(const LookaheadWindow& windows) const;
  // Conditioning of one text row given precomputed window features
  // (1 x hidden) for a frame.
  Tensor ConditionWithFeatures(const Tensor& g_row, const Tensor& window_feature_row) const;

  std::size_t width() const { return width_; }

 private:
  std::size_t width_ = 0, embed_dim_ = 0, hidden_dim_ = 0, text_dim_ = 0;
  Tensor embedding_, text_proj_, window_proj_, hidden_bias_, out_proj_, out_bias_;
};

// logits[t][u] = joint(h_t, g_hat[t][u]).
Tensor LookaheadLattice(const JointNetwork& joint, const Tensor& h, const Tensor& g_hat);

}  // namespace lat

#endif  // LAT_LOOKAHEAD_HPP_
