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

#include "lat/decode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lat/transducer_loss.hpp"

namespace lat {

void DecodeConfig::Validate() const {
  if (beam_size == 0) throw std::invalid_argument("beam_size must be >= 1");
  if (max_symbols_per_frame == 0) {
    throw std::invalid_argument("max_symbols_per_frame must be >= 1");
  }
}

DecodeConfig DecodeConfig::FromConfig(const KeyValueConfig& cfg) {
  DecodeConfig d;
  d.beam_size = cfg.GetSize("decode.beam_size", d.beam_size);
  d.max_symbols_per_frame = cfg.GetSize("decode.max_symbols_per_frame", d.max_symbols_per_frame);
  const std::string mode = cfg.GetString("decode.mode", "beam");
  if (mode == "greedy") {
    d.mode = Mode::kGreedy;
  } else if (mode == "beam") {
    d.mode = Mode::kBeam;
  } else {
    throw ConfigError("decode.mode must be greedy or beam, got " + mode);
  }
  d.Validate();
  return d;
}

namespace {

// Per-utterance precomputation shared by all hypotheses: the acoustic half of
// the joint and, with lookahead, the window features of every frame.
class FrameScorer {
 public:
  FrameScorer(const TransducerModel& model, const Tensor& x, bool lookahead)
      : model_(model), lookahead_(lookahead) {
    const Tensor h = model.acoustic().Encode(x);
    frames_ = h.dim(0);
    acoustic_ = model.joint().ProjectAcoustic(h);
    if (lookahead_) {
      windows_ = model.Windows(h);
      window_features_ = model.conditioner().WindowFeatures(windows_);
    }
  }

  std::size_t frames() const { return frames_; }
  const LookaheadWindow& windows() const { return windows_; }

  std::vector<double> LogProbs(const TextState& state, std::size_t t) const {
    Tensor g = state.output;
    if (lookahead_) {
      g = model_.conditioner().ConditionWithFeatures(g, Slice(window_features_, 0, t, t + 1));
    }
    const Tensor logits = model_.joint().Output(
        Add(Slice(acoustic_, 0, t, t + 1), model_.joint().ProjectText(g)));
    const Tensor lp = LogSoftmax(logits);
    return {lp.data().begin(), lp.data().end()};
  }

  HorizonStats Horizon() const {
    HorizonStats stats;
    if (!lookahead_ || windows_.frames() == 0) return stats;
    double total = 0.0;
    for (std::size_t t = 0; t < windows_.frames(); ++t) {
      total += static_cast<double>(windows_.horizon[t]);
      stats.max = std::max(stats.max, windows_.horizon[t]);
      if (windows_.real[t] < windows_.width) ++stats.padded_rows;
    }
    stats.mean = total / static_cast<double>(windows_.frames());
    return stats;
  }

 private:
  const TransducerModel& model_;
  bool lookahead_;
  std::size_t frames_ = 0;
  Tensor acoustic_;
  LookaheadWindow windows_;
  Tensor window_features_;
};

int ArgMax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<int>(best);
}

// Score descending, then token ids ascending, then shorter first.
bool Ranks(double score_a, const std::vector<int>& a, double score_b, const std::vector<int>& b) {
  if (score_a != score_b) return score_a > score_b;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Hypothesis GreedySearch(const TransducerModel& model, const FrameScorer& scorer,
                        const DecodeConfig& cfg) {
  Hypothesis hyp;
  hyp.le_state = model.text().Start();
  for (std::size_t t = 0; t < scorer.frames(); ++t) {
    for (std::size_t n = 0;; ++n) {
      const std::vector<double> lp = scorer.LogProbs(hyp.le_state, t);
      if (n == cfg.max_symbols_per_frame) {
        hyp.log_prob += lp[kBlankId];
        break;
      }
      const int k = ArgMax(lp);
      hyp.log_prob += lp[k];
      if (k == kBlankId) break;
      hyp.tokens.push_back(k);
      hyp.frames.push_back(t);
      hyp.le_state = model.text().Step(hyp.le_state, k);
    }
    hyp.last_frame = t;
  }
  return hyp;
}

struct Open {
  Hypothesis hyp;
  std::size_t emitted = 0;  // labels emitted at the current frame
};

// Best-first prefix search per frame. Open prefixes are popped in score
// order; each pop closes the frame with a blank (merged into `closed` by
// labeling) and pushes its label extensions. Extending only lowers a score,
// so the frame ends once `width` closed hypotheses beat every open prefix.
std::vector<Hypothesis> BeamSearch(const TransducerModel& model, const FrameScorer& scorer,
                                   const DecodeConfig& cfg) {
  Hypothesis start;
  start.le_state = model.text().Start();
  std::vector<Hypothesis> beam{start};
  const std::size_t width = cfg.beam_size;
  auto better = [](const Hypothesis& a, const Hypothesis& b) {
    return Ranks(a.log_prob, a.tokens, b.log_prob, b.tokens);
  };

  for (std::size_t t = 0; t < scorer.frames(); ++t) {
    std::vector<Open> open;
    for (auto& h : beam) open.push_back({std::move(h), 0});
    std::vector<Hypothesis> closed;
    while (!open.empty()) {
      auto best = std::min_element(open.begin(), open.end(), [&](const Open& a, const Open& b) {
        return better(a.hyp, b.hyp);
      });
      if (closed.size() >= width) {
        std::nth_element(closed.begin(), closed.begin() + (width - 1), closed.end(), better);
        if (!better(best->hyp, closed[width - 1])) break;
      }
      Open cur = std::move(*best);
      open.erase(best);

      const std::vector<double> lp = scorer.LogProbs(cur.hyp.le_state, t);
      const double close_score = cur.hyp.log_prob + lp[kBlankId];
      auto same = std::find_if(closed.begin(), closed.end(),
                               [&](const Hypothesis& c) { return c.tokens == cur.hyp.tokens; });
      if (same != closed.end()) {
        same->log_prob = LogAddExp(same->log_prob, close_score);
      } else {
        Hypothesis c = cur.hyp;
        c.log_prob = close_score;
        c.last_frame = t;
        closed.push_back(std::move(c));
      }
      if (cur.emitted == cfg.max_symbols_per_frame) continue;
      for (std::size_t k = 0; k < lp.size(); ++k) {
        if (static_cast<int>(k) == kBlankId) continue;
        Hypothesis h;
        h.tokens = cur.hyp.tokens;
        h.tokens.push_back(static_cast<int>(k));
        h.frames = cur.hyp.frames;
        h.frames.push_back(t);
        h.log_prob = cur.hyp.log_prob + lp[k];
        h.last_frame = t;
        // Same labeling reached by another alignment in this frame.
        auto dup = std::find_if(open.begin(), open.end(), [&](const Open& o) {
          return o.emitted == cur.emitted + 1 && o.hyp.tokens == h.tokens;
        });
        if (dup != open.end()) {
          dup->hyp.log_prob = LogAddExp(dup->hyp.log_prob, h.log_prob);
          continue;
        }
        h.le_state = model.text().Step(cur.hyp.le_state, static_cast<int>(k));
        open.push_back({std::move(h), cur.emitted + 1});
      }
    }
    std::sort(closed.begin(), closed.end(), better);
    if (closed.size() > width) closed.resize(width);
    beam = std::move(closed);
  }
  return beam;
}

}  // namespace

DecodeOutput GreedyDecode(const TransducerModel& model, const Tensor& x, bool lookahead_enabled,
                          const DecodeConfig& cfg) {
  cfg.Validate();
  FrameScorer scorer(model, x, lookahead_enabled);
  DecodeOutput out;
  out.hypotheses.push_back(GreedySearch(model, scorer, cfg));
  out.horizon = scorer.Horizon();
  return out;
}

DecodeOutput BeamDecode(const TransducerModel& model, const Tensor& x, const DecodeConfig& cfg,
                        bool lookahead_enabled) {
  cfg.Validate();
  // A single-entry beam is greedy search.
  if (cfg.beam_size == 1) return GreedyDecode(model, x, lookahead_enabled, cfg);
  FrameScorer scorer(model, x, lookahead_enabled);
  DecodeOutput out;
  out.hypotheses = BeamSearch(model, scorer, cfg);
  Hypothesis greedy = GreedySearch(model, scorer, cfg);
  auto same = std::find_if(out.hypotheses.begin(), out.hypotheses.end(),
                           [&](const Hypothesis& h) { return h.tokens == greedy.tokens; });
  if (same != out.hypotheses.end()) {
    if (greedy.log_prob > same->log_prob) *same = std::move(greedy);
  } else {
    out.hypotheses.push_back(std::move(greedy));
  }
  std::sort(out.hypotheses.begin(), out.hypotheses.end(),
            [](const Hypothesis& a, const Hypothesis& b) {
              return Ranks(a.log_prob, a.tokens, b.log_prob, b.tokens);
            });
  if (out.hypotheses.size() > cfg.beam_size) out.hypotheses.resize(cfg.beam_size);
  out.horizon = scorer.Horizon();
  return out;
}

DecodeOutput Decode(const TransducerModel& model, const Tensor& x, const DecodeConfig& cfg) {
  if (cfg.mode == DecodeConfig::Mode::kGreedy) {
    return GreedyDecode(model, x, model.lookahead_enabled(), cfg);
  }
  return BeamDecode(model, x, cfg, model.lookahead_enabled());
}

}  // namespace lat
