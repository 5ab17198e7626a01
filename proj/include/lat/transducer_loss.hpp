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

// RNN-T negative log-likelihood over the T x (U+1) alignment lattice.
//
// A lattice cell (t, u) means u labels have been emitted after consuming
// frames < t. From (t, u) a blank moves to (t+1, u) and label y[u] moves to
// (t, u+1); every alignment ends with a blank out of (T-1, U).

#ifndef LAT_TRANSDUCER_LOSS_HPP_
#define LAT_TRANSDUCER_LOSS_HPP_

#include <span>
#include <vector>

#include "lat/nn.hpp"
#include "lat/tensor.hpp"

namespace lat {

// Read-only view of T x (U+1) x V values in row-major order.
struct LatticeView {
  std::span<const double> values;
  std::size_t frames = 0;
  std::size_t positions = 0;  // U + 1
  std::size_t vocab = 0;

  double at(std::size_t t, std::size_t u, std::size_t v) const {
    return values[(t * positions + u) * vocab + v];
  }
  static LatticeView Of(const Tensor& lattice);
};

// Log-domain forward/backward tables, both T x (U+1) row-major.
struct AlphaBeta {
  std::size_t frames = 0;
  std::size_t positions = 0;
  std::vector<double> alpha;
  std::vector<double> beta;
  double log_likelihood_forward = 0.0;   // alpha(T-1,U) + blank
  double log_likelihood_backward = 0.0;  // beta(0,0)

  double a(std::size_t t, std::size_t u) const { return alpha[t * positions + u]; }
  double b(std::size_t t, std::size_t u) const { return beta[t * positions + u]; }
};

double LogAddExp(double a, double b);

// Per-cell log-softmax of raw logits.
std::vector<double> LatticeLogSoftmax(const LatticeView& logits);

// Forward/backward recursions over already-normalized log-probabilities.
AlphaBeta ComputeAlphaBeta(const LatticeView& log_probs, std::span<const int> labels);

struct TransducerLoss {
  double loss = 0.0;          // -log P(y | x)
  std::vector<double> grad;   // d loss / d raw logits, same layout as input
  AlphaBeta tables;
};

// Loss and analytic gradient with respect to the raw (pre-softmax) logits.
// Throws DimensionError when positions != labels.size() + 1 or frames < 1.
TransducerLoss ComputeTransducerLoss(const LatticeView& logits, std::span<const int> labels);

// Taped form: scalar loss whose backward rule adds upstream * grad into the
// lattice. The DP itself is not recorded.
Tensor RnntLoss(const Tensor& lattice, std::span<const int> labels);

// Broadcasts per-frame logits (T x V) along the label axis: T x (U+1) x V.
Tensor RepeatOverPositions(const Tensor& frame_logits, std::size_t positions);

// Transducer loss of the implicit acoustic model: every cell (t, u) uses
// joint(h_t, 0).
Tensor IamLoss(const JointNetwork& joint, const Tensor& h, std::span<const int> labels);

}  // namespace lat

#endif  // LAT_TRANSDUCER_LOSS_HPP_
