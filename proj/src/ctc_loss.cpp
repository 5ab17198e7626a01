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


#include "lat/ctc_loss.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "lat/nn.hpp"
#include "lat/transducer_loss.hpp"

namespace lat {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

CtcResult ComputeCtcLoss(std::span<const double> logits, std::size_t frames, std::size_t vocab,
                         std::span<const int> labels) {
  if (frames < 1) throw DimensionError("ctc_loss: no frames");
  if (logits.size() != frames * vocab) throw DimensionError("ctc_loss: logits are not T x V");
  std::size_t needed = labels.size();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y == kBlankId || y < 0 || static_cast<std::size_t>(y) >= vocab) {
      throw DimensionError("ctc_loss: invalid label id " + std::to_string(y));
    }
    if (i > 0 && labels[i - 1] == y) ++needed;
  }
  if (needed > frames) {
    throw DimensionError("ctc_loss: " + std::to_string(frames) + " frames cannot spell " +
                         std::to_string(labels.size()) + " labels");
  }

  // Extended sequence: blank, y1, blank, y2, ..., blank.
  const std::size_t S = 2 * labels.size() + 1;
  auto ext = [&](std::size_t s) { return s % 2 == 0 ? kBlankId : labels[s / 2]; };
  auto skip_allowed = [&](std::size_t s) { return s >= 2 && s % 2 == 1 && ext(s) != ext(s - 2); };

  std::vector<double> lp(frames * vocab);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* row = logits.data() + t * vocab;
    double m = row[0];
    for (std::size_t v = 1; v < vocab; ++v) m = std::max(m, row[v]);
    double z = 0.0;
    for (std::size_t v = 0; v < vocab; ++v) z += std::exp(row[v] - m);
    const double log_z = m + std::log(z);
    for (std::size_t v = 0; v < vocab; ++v) lp[t * vocab + v] = row[v] - log_z;
  }
  auto emit = [&](std::size_t t, std::size_t s) { return lp[t * vocab + ext(s)]; };

  std::vector<double> alpha(frames * S, kNegInf), beta(frames * S, kNegInf);
  alpha[0] = emit(0, 0);
  if (S > 1) alpha[1] = emit(0, 1);
  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double a = alpha[(t - 1) * S + s];
      if (s >= 1) a = LogAddExp(a, alpha[(t - 1) * S + s - 1]);
      if (skip_allowed(s)) a = LogAddExp(a, alpha[(t - 1) * S + s - 2]);
      if (a != kNegInf) alpha[t * S + s] = a + emit(t, s);
    }
  }
  // beta excludes the emission at its own frame.
  beta[(frames - 1) * S + S - 1] = 0.0;
  if (S > 1) beta[(frames - 1) * S + S - 2] = 0.0;
  for (std::size_t t = frames - 1; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double b = beta[(t + 1) * S + s] + emit(t + 1, s);
      if (s + 1 < S) b = LogAddExp(b, beta[(t + 1) * S + s + 1] + emit(t + 1, s + 1));
      if (s + 2 < S && skip_allowed(s + 2)) {
        b = LogAddExp(b, beta[(t + 1) * S + s + 2] + emit(t + 1, s + 2));
      }
      beta[t * S + s] = b;
    }
  }
  double log_p = alpha[(frames - 1) * S + S - 1];
  if (S > 1) log_p = LogAddExp(log_p, alpha[(frames - 1) * S + S - 2]);

  CtcResult out;
  out.loss = -log_p;
  out.grad.resize(frames * vocab);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t v = 0; v < vocab; ++v) out.grad[t * vocab + v] = std::exp(lp[t * vocab + v]);
    for (std::size_t s = 0; s < S; ++s) {
      const double occ = alpha[t * S + s] + beta[t * S + s] - log_p;
      if (occ != kNegInf) out.grad[t * vocab + ext(s)] -= std::exp(occ);
    }
  }
  return out;
}

Tensor CtcLoss(const Tensor& frame_logits, std::span<const int> labels) {
  if (frame_logits.rank() != 2) {
    throw DimensionError("ctc_loss: logits must be T x V, got " +
                         ShapeToString(frame_logits.shape()));
  }
  CtcResult r =
      ComputeCtcLoss(frame_logits.data(), frame_logits.dim(0), frame_logits.dim(1), labels);
  auto grad = std::make_shared<std::vector<double>>(std::move(r.grad));
  return MakeResult({}, {r.loss}, {frame_logits}, [frame_logits, grad](detail::Node& self) {
    std::vector<double> g(*grad);
    for (double& v : g) v *= self.grad[0];
    AccumulateGrad(frame_logits, g);
  });
}

}  // namespace lat
