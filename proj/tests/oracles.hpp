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

// Slow reference implementations used only by tests. None of them share
// code with the library beyond the Tensor container.

#ifndef LAT_TESTS_ORACLES_HPP_
#define LAT_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "lat/nn.hpp"
#include "lat/random.hpp"
#include "lat/tensor.hpp"

namespace oracle {

// Plain log(sum(exp(v))) without tricks beyond max subtraction.
inline double LogSumExp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

inline std::vector<double> LogSoftmaxRow(const double* row, std::size_t n) {
  std::vector<double> v(row, row + n);
  const double z = LogSumExp(v);
  for (double& x : v) x -= z;
  return v;
}

// Every monotonic alignment as a string of steps: 0 = blank (advance t),
// 1 = label (advance u). Exactly T blanks and U labels, ending in a blank.
inline void EnumerateAlignments(std::size_t T, std::size_t U, std::vector<int>& prefix,
                                std::size_t blanks, std::size_t labels,
                                std::vector<std::vector<int>>& out) {
  if (blanks == T && labels == U) {
    if (!prefix.empty() && prefix.back() == 0) out.push_back(prefix);
    return;
  }
  if (blanks < T) {
    prefix.push_back(0);
    EnumerateAlignments(T, U, prefix, blanks + 1, labels, out);
    prefix.pop_back();
  }
  // A label can only be emitted while t < T, i.e. before the final blank.
  if (labels < U && blanks < T) {
    prefix.push_back(1);
    EnumerateAlignments(T, U, prefix, blanks, labels + 1, out);
    prefix.pop_back();
  }
}

inline std::vector<std::vector<int>> Alignments(std::size_t T, std::size_t U) {
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  EnumerateAlignments(T, U, prefix, 0, 0, out);
  return out;
}

// -log P(y|x) by summing every alignment's probability. `logits` is a raw
// T x (U+1) x V buffer, blank id 0.
inline double BruteForceTransducerLoss(const std::vector<double>& logits, std::size_t T,
                                       std::size_t U, std::size_t V,
                                       const std::vector<int>& labels) {
  std::vector<double> path_scores;
  for (const auto& path : Alignments(T, U)) {
    std::size_t t = 0, u = 0;
    double score = 0.0;
    for (int step : path) {
      const auto lp = LogSoftmaxRow(&logits[(t * (U + 1) + u) * V], V);
      if (step == 0) {
        score += lp[0];
        ++t;
      } else {
        score += lp[static_cast<std::size_t>(labels[u])];
        ++u;
      }
    }
    path_scores.push_back(score);
  }
  return -LogSumExp(path_scores);
}

// -log of the summed probability of every length-T frame path (V^T of them)
// that spells `labels` after merging repeats and dropping blanks.
inline double BruteForceCtcLoss(const std::vector<double>& logits, std::size_t T, std::size_t V,
                                const std::vector<int>& labels) {
  std::vector<std::vector<double>> lp;
  for (std::size_t t = 0; t < T; ++t) lp.push_back(LogSoftmaxRow(logits.data() + t * V, V));
  std::vector<double> scores;
  std::vector<int> path(T, 0);
  while (true) {
    std::vector<int> collapsed;
    int prev = -1;
    for (int p : path) {
      if (p != prev && p != lat::kBlankId) collapsed.push_back(p);
      prev = p;
    }
    if (collapsed == labels) {
      double score = 0.0;
      for (std::size_t t = 0; t < T; ++t) score += lp[t][path[t]];
      scores.push_back(score);
    }
    std::size_t i = 0;
    while (i < T && ++path[i] == static_cast<int>(V)) path[i++] = 0;
    if (i == T) break;
  }
  if (scores.empty()) return std::numeric_limits<double>::infinity();
  return -LogSumExp(scores);
}

// Central differences of f at every coordinate of `x`.
inline std::vector<double> NumericGradient(const std::function<double()>& f,
                                           std::span<double> x, double eps = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + eps;
    const double up = f();
    x[i] = keep - eps;
    const double down = f();
    x[i] = keep;
    g[i] = (up - down) / (2.0 * eps);
  }
  return g;
}

// Relative error with an absolute floor so exact zeros compare sensibly.
inline double RelativeError(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

inline double MaxRelativeError(const std::vector<double>& a, const std::vector<double>& b,
                               double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, RelativeError(a[i], b[i], floor));
  return worst;
}

// Row t of the lookahead window by scanning forward from t.
inline std::vector<int> WindowRowByScan(const std::vector<int>& path, std::size_t t,
                                        std::size_t w, int blank, int pad) {
  std::vector<int> row;
  for (std::size_t s = t; s < path.size() && row.size() < w; ++s) {
    if (path[s] != blank) row.push_back(path[s]);
  }
  while (row.size() < w) row.push_back(pad);
  return row;
}

// Edit distance by plain recursion over suffixes (no memo), unit costs.
inline double RecursiveEditDistance(const std::vector<std::string>& a, std::size_t i,
                                    const std::vector<std::string>& b, std::size_t j) {
  if (i == a.size()) return static_cast<double>(b.size() - j);
  if (j == b.size()) return static_cast<double>(a.size() - i);
  const double sub = RecursiveEditDistance(a, i + 1, b, j + 1) + (a[i] == b[j] ? 0.0 : 1.0);
  const double del = RecursiveEditDistance(a, i + 1, b, j) + 1.0;
  const double ins = RecursiveEditDistance(a, i, b, j + 1) + 1.0;
  return std::min({sub, del, ins});
}

inline std::vector<double> RandomVector(lat::Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * lat::Normal(rng);
  return v;
}

inline lat::Tensor RandomTensor(lat::Rng& rng, lat::Shape shape, double scale = 1.0,
                                bool requires_grad = false) {
  const std::size_t n = lat::NumElements(shape);
  return lat::Tensor(std::move(shape), RandomVector(rng, n, scale), requires_grad);
}

}  // namespace oracle

#endif  // LAT_TESTS_ORACLES_HPP_
