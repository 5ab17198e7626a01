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

#include "lat/lookahead.hpp"

#include <algorithm>
#include <stdexcept>

namespace lat {

IamGreedyPath IamGreedy(const Tensor& frame_logits) {
  if (frame_logits.rank() != 2) {
    throw DimensionError("iam_greedy: expected T x V logits, got " +
                         ShapeToString(frame_logits.shape()));
  }
  const std::size_t T = frame_logits.dim(0), V = frame_logits.dim(1);
  auto x = frame_logits.data();
  IamGreedyPath path;
  path.tokens.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    std::size_t best = 0;
    for (std::size_t v = 1; v < V; ++v) {
      if (x[t * V + v] > x[t * V + best]) best = v;
    }
    path.tokens[t] = static_cast<int>(best);
  }
  return path;
}

IamGreedyPath IamGreedy(const JointNetwork& joint, const Tensor& h) {
  return IamGreedy(joint.ImplicitAcousticLogits(h));
}

LookaheadWindow ExtractWindows(const IamGreedyPath& path, std::size_t w, int pad_id,
                               std::optional<std::size_t> max_horizon) {
  if (w == 0) throw std::invalid_argument("extract_windows: w must be >= 1");
  const std::size_t T = path.tokens.size();
  LookaheadWindow win;
  win.width = w;
  win.ids.assign(T * w, pad_id);
  win.real.assign(T, 0);
  win.horizon.assign(T, 0);
  if (T == 0) return win;

  if (!max_horizon) {
    // Right-to-left: a blank frame inherits the next row, a labelled frame
    // prepends its token and drops the last entry of the next row.
    for (std::size_t t = T; t-- > 0;) {
      const int tok = path.tokens[t];
      int* row = win.ids.data() + t * w;
      const bool has_next = t + 1 < T;
      const int* next = has_next ? win.ids.data() + (t + 1) * w : nullptr;
      const std::size_t next_real = has_next ? win.real[t + 1] : 0;
      if (tok == kBlankId) {
        if (has_next) std::copy_n(next, w, row);
        win.real[t] = next_real;
      } else {
        row[0] = tok;
        for (std::size_t k = 1; k < w; ++k) row[k] = has_next ? next[k - 1] : pad_id;
        win.real[t] = std::min(w, next_real + 1);
      }
    }
    std::vector<std::size_t> labelled;
    for (std::size_t t = 0; t < T; ++t) {
      if (path.tokens[t] != kBlankId) labelled.push_back(t);
    }
    std::size_t first = 0;  // index into `labelled` of the first position >= t
    for (std::size_t t = 0; t < T; ++t) {
      while (first < labelled.size() && labelled[first] < t) ++first;
      const std::size_t wth = first + w - 1;
      win.horizon[t] = (wth < labelled.size() ? labelled[wth] : T - 1) - t;
    }
    return win;
  }

  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t end = std::min(T - 1, t + *max_horizon);
    std::size_t n = 0, s = t;
    for (; s <= end && n < w; ++s) {
      if (path.tokens[s] != kBlankId) win.ids[t * w + n++] = path.tokens[s];
    }
    win.real[t] = n;
    win.horizon[t] = (n == w ? s - 1 : end) - t;
  }
  return win;
}

LookaheadConditioner::LookaheadConditioner(Parameters& params, const LookaheadConfig& cfg,
                                           std::size_t vocab_size, std::size_t text_dim, Rng& rng)
    : width_(cfg.w), embed_dim_(cfg.embed_dim), hidden_dim_(cfg.hidden_dim), text_dim_(text_dim) {
  if (cfg.w == 0) throw std::invalid_argument("lookahead.w must be >= 1");
  const std::size_t window_dim = cfg.w * cfg.embed_dim;
  embedding_ = params.Add("la.embedding", UniformInit({vocab_size, cfg.embed_dim}, 1, rng));
  text_proj_ = params.Add("la.text_proj",
                          UniformInit({text_dim, cfg.hidden_dim}, text_dim + window_dim, rng));
  window_proj_ = params.Add("la.window_proj",
                            UniformInit({window_dim, cfg.hidden_dim}, text_dim + window_dim, rng));
  hidden_bias_ = params.Add("la.hidden_bias", Tensor::Zeros({1, cfg.hidden_dim}));
  out_proj_ = params.Add("la.out_proj", cfg.zero_init_output
                                            ? Tensor::Zeros({cfg.hidden_dim, text_dim})
                                            : UniformInit({cfg.hidden_dim, text_dim},
                                                          cfg.hidden_dim, rng));
  out_bias_ = params.Add("la.out_bias", Tensor::Zeros({1, text_dim}));
}

Tensor LookaheadConditioner::WindowFeatures(const LookaheadWindow& windows) const {
  if (windows.width != width_) {
    throw DimensionError("condition: window width " + std::to_string(windows.width) +
                         " but conditioner expects " + std::to_string(width_));
  }
  const std::size_t T = windows.frames();
  Tensor embedded = Reshape(Embedding(embedding_, windows.ids), {T, width_ * embed_dim_});
  return MatMul(embedded, window_proj_);
}

Tensor LookaheadConditioner::Condition(const Tensor& g, const LookaheadWindow& windows) const {
  if (g.rank() != 2 || g.dim(1) != text_dim_) {
    throw DimensionError("condition: text encoding " + ShapeToString(g.shape()) +
                         " does not have width " + std::to_string(text_dim_));
  }
  // The affine map of [g_u ; window] is split into its two blocks so the
  // window half is computed once per frame and the text half once per u.
  const std::size_t T = windows.frames(), P = g.dim(0);
  Tensor from_window = Reshape(WindowFeatures(windows), {T, 1, hidden_dim_});
  Tensor from_text = Reshape(AddBias(MatMul(g, text_proj_), hidden_bias_), {1, P, hidden_dim_});
  Tensor hidden = Reshape(Tanh(BroadcastAdd(from_window, from_text)), {T * P, hidden_dim_});
  Tensor delta = Reshape(AddBias(MatMul(hidden, out_proj_), out_bias_), {T, P, text_dim_});
  return BroadcastAdd(delta, Reshape(g, {1, P, text_dim_}));
}

Tensor LookaheadConditioner::ConditionWithFeatures(const Tensor& g_row,
                                                   const Tensor& window_feature_row) const {
  Tensor from_text = AddBias(MatMul(g_row, text_proj_), hidden_bias_);
  Tensor hidden = Tanh(Add(window_feature_row, from_text));
  Tensor delta = AddBias(MatMul(hidden, out_proj_), out_bias_);
  return Add(delta, g_row);
}

Tensor LookaheadConditioner::ConditionRow(const Tensor& g_row,
                                          std::span<const int> window_row) const {
  if (window_row.size() != width_) throw DimensionError("condition: window row width mismatch");
  Tensor embedded = Reshape(Embedding(embedding_, window_row), {1, width_ * embed_dim_});
  return ConditionWithFeatures(g_row, MatMul(embedded, window_proj_));
}

Tensor LookaheadLattice(const JointNetwork& joint, const Tensor& h, const Tensor& g_hat) {
  return joint.ConditionedLattice(h, g_hat);
}

}  // namespace lat
