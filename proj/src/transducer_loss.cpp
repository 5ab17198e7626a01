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

#include "lat/transducer_loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lat {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void CheckShapes(const LatticeView& lattice, std::span<const int> labels) {
  if (lattice.frames < 1) throw DimensionError("rnnt_loss: lattice has no frames");
  if (lattice.positions != labels.size() + 1) {
    throw DimensionError("rnnt_loss: lattice has " + std::to_string(lattice.positions) +
                         " label positions but transcript needs " +
                         std::to_string(labels.size() + 1));
  }
  for (int y : labels) {
    if (y == kBlankId || y < 0 || static_cast<std::size_t>(y) >= lattice.vocab) {
      throw DimensionError("rnnt_loss: invalid label id " + std::to_string(y));
    }
  }
}
}  // namespace

LatticeView LatticeView::Of(const Tensor& lattice) {
  if (lattice.rank() != 3) {
    throw DimensionError("lattice must be T x (U+1) x V, got " + ShapeToString(lattice.shape()));
  }
  return {lattice.data(), lattice.dim(0), lattice.dim(1), lattice.dim(2)};
}

double LogAddExp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return std::max(a, b) + std::log1p(std::exp(-std::abs(a - b)));
}

std::vector<double> LatticeLogSoftmax(const LatticeView& logits) {
  const std::size_t v = logits.vocab;
  std::vector<double> out(logits.values.size());
  for (std::size_t cell = 0; cell < logits.frames * logits.positions; ++cell) {
    const double* in = logits.values.data() + cell * v;
    double* o = out.data() + cell * v;
    const double mx = *std::max_element(in, in + v);
    double s = 0.0;
    for (std::size_t j = 0; j < v; ++j) s += std::exp(in[j] - mx);
    const double lse = mx + std::log(s);
    for (std::size_t j = 0; j < v; ++j) o[j] = in[j] - lse;
  }
  return out;
}

AlphaBeta ComputeAlphaBeta(const LatticeView& lp, std::span<const int> labels) {
  CheckShapes(lp, labels);
  const std::size_t T = lp.frames, U = labels.size(), P = lp.positions;
  AlphaBeta ab;
  ab.frames = T;
  ab.positions = P;
  ab.alpha.assign(T * P, kNegInf);
  ab.beta.assign(T * P, kNegInf);

  ab.alpha[0] = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t u = 0; u <= U; ++u) {
      if (t == 0 && u == 0) continue;
      double from_blank = kNegInf, from_label = kNegInf;
      if (t > 0) from_blank = ab.alpha[(t - 1) * P + u] + lp.at(t - 1, u, kBlankId);
      if (u > 0) from_label = ab.alpha[t * P + u - 1] + lp.at(t, u - 1, labels[u - 1]);
      ab.alpha[t * P + u] = LogAddExp(from_blank, from_label);
    }
  }
  ab.log_likelihood_forward = ab.alpha[(T - 1) * P + U] + lp.at(T - 1, U, kBlankId);

  ab.beta[(T - 1) * P + U] = lp.at(T - 1, U, kBlankId);
  for (std::size_t t = T; t-- > 0;) {
    for (std::size_t u = U + 1; u-- > 0;) {
      if (t == T - 1 && u == U) continue;
      double via_blank = kNegInf, via_label = kNegInf;
      if (t + 1 < T) via_blank = ab.beta[(t + 1) * P + u] + lp.at(t, u, kBlankId);
      if (u < U) via_label = ab.beta[t * P + u + 1] + lp.at(t, u, labels[u]);
      ab.beta[t * P + u] = LogAddExp(via_blank, via_label);
    }
  }
  ab.log_likelihood_backward = ab.beta[0];
  return ab;
}

TransducerLoss ComputeTransducerLoss(const LatticeView& logits, std::span<const int> labels) {
  CheckShapes(logits, labels);
  const std::vector<double> log_probs = LatticeLogSoftmax(logits);
  const LatticeView lp{log_probs, logits.frames, logits.positions, logits.vocab};
  TransducerLoss result;
  result.tables = ComputeAlphaBeta(lp, labels);
  const AlphaBeta& ab = result.tables;
  const double total = ab.log_likelihood_backward;
  result.loss = -total;

  // d loss / d z_v = p_v * occ(t,u) - [v taken out of (t,u)] * transition
  // posterior, with occ = exp(alpha + beta - total).
  const std::size_t T = logits.frames, U = labels.size(), P = logits.positions, V = logits.vocab;
  result.grad.assign(logits.values.size(), 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t u = 0; u <= U; ++u) {
      const double alpha = ab.alpha[t * P + u];
      const double occupancy = std::exp(alpha + ab.beta[t * P + u] - total);
      double* g = result.grad.data() + (t * P + u) * V;
      const double* cell = log_probs.data() + (t * P + u) * V;
      for (std::size_t v = 0; v < V; ++v) g[v] = std::exp(cell[v]) * occupancy;
      double blank_next = kNegInf;
      if (t + 1 < T) {
        blank_next = ab.beta[(t + 1) * P + u];
      } else if (u == U) {
        blank_next = 0.0;  // the final blank terminates the alignment
      }
      if (blank_next != kNegInf) g[kBlankId] -= std::exp(alpha + cell[kBlankId] + blank_next - total);
      if (u < U) {
        const int y = labels[u];
        g[y] -= std::exp(alpha + cell[y] + ab.beta[t * P + u + 1] - total);
      }
    }
  }
  return result;
}

Tensor RnntLoss(const Tensor& lattice, std::span<const int> labels) {
  const LatticeView view = LatticeView::Of(lattice);
  TransducerLoss result = ComputeTransducerLoss(view, labels);
  auto grad = std::make_shared<std::vector<double>>(std::move(result.grad));
  return MakeResult({}, {result.loss}, {lattice}, [lattice, grad](detail::Node& self) {
    const double upstream = self.grad[0];
    std::vector<double> g(*grad);
    for (double& v : g) v *= upstream;
    AccumulateGrad(lattice, g);
  });
}

Tensor RepeatOverPositions(const Tensor& frame_logits, std::size_t positions) {
  if (frame_logits.rank() != 2) {
    throw DimensionError("per-frame logits must be T x V, got " +
                         ShapeToString(frame_logits.shape()));
  }
  const std::size_t T = frame_logits.dim(0), V = frame_logits.dim(1);
  return BroadcastAdd(Reshape(frame_logits, {T, 1, V}), Tensor::Zeros({1, positions, V}));
}

Tensor IamLoss(const JointNetwork& joint, const Tensor& h, std::span<const int> labels) {
  return RnntLoss(RepeatOverPositions(joint.ImplicitAcousticLogits(h), labels.size() + 1),
                  labels);
}

}  // namespace lat
