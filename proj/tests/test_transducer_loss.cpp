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

#include <cmath>

#include "doctest.h"
#include "lat/nn.hpp"
#include "lat/transducer_loss.hpp"
#include "oracles.hpp"

using namespace lat;

namespace {

struct Instance {
  std::size_t T, U, V;
  std::vector<int> labels;
  Tensor lattice;
};

Instance RandomInstance(Rng& rng, std::size_t max_t = 4, std::size_t max_u = 3,
                        std::size_t max_v = 5) {
  Instance in;
  in.T = 1 + rng() % max_t;
  in.U = rng() % (max_u + 1);
  in.V = 2 + rng() % (max_v - 1);
  for (std::size_t u = 0; u < in.U; ++u) in.labels.push_back(UniformInt(rng, 1, static_cast<int>(in.V) - 1));
  in.lattice = oracle::RandomTensor(rng, {in.T, in.U + 1, in.V}, 2.0);
  return in;
}

std::vector<double> Values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

TEST_CASE("single forced alignment") {
  const Tensor lattice({1, 1, 3}, {0.3, -1.0, 2.0});
  const int* none = nullptr;
  const auto r = ComputeTransducerLoss(LatticeView::Of(lattice), std::span<const int>(none, 0));
  const double z = std::log(std::exp(0.3) + std::exp(-1.0) + std::exp(2.0));
  CHECK(std::abs(r.loss - (z - 0.3)) < 1e-12);
}

TEST_CASE("uniform lattice with two paths") {
  // T=2, U=1, every cell uniform over V: each path has 3 steps of prob 1/V.
  const std::size_t V = 4;
  const Tensor lattice = Tensor::Zeros({2, 2, V});
  const std::vector<int> y{2};
  const auto r = ComputeTransducerLoss(LatticeView::Of(lattice), y);
  CHECK(std::abs(r.loss + std::log(2.0 * std::pow(1.0 / V, 3))) < 1e-12);
}

TEST_CASE("loss matches exhaustive enumeration and finite differences") {
  Rng rng = MakeRng(1, "rnnt");
  for (int i = 0; i < 60; ++i) {
    Instance in = RandomInstance(rng);
    const auto r = ComputeTransducerLoss(LatticeView::Of(in.lattice), in.labels);
    const double brute = oracle::BruteForceTransducerLoss(Values(in.lattice), in.T, in.U, in.V, in.labels);
    CHECK(std::abs(r.loss - brute) < 1e-9);
    CHECK(std::abs(r.tables.log_likelihood_forward - r.tables.log_likelihood_backward) < 1e-9);

    const auto numeric = oracle::NumericGradient(
        [&] { return oracle::BruteForceTransducerLoss(Values(in.lattice), in.T, in.U, in.V, in.labels); },
        in.lattice.mutable_data());
    CHECK(oracle::MaxRelativeError(r.grad, numeric) < 1e-4);
  }
}

TEST_CASE("posteriors normalize on every anti-diagonal") {
  Rng rng = MakeRng(2, "diag");
  for (int i = 0; i < 30; ++i) {
    Instance in = RandomInstance(rng, 6, 4, 6);
    const auto r = ComputeTransducerLoss(LatticeView::Of(in.lattice), in.labels);
    const double total = r.tables.log_likelihood_backward;
    // Cells on diagonal n = t + u are exactly the states occupied after n
    // steps.
    for (std::size_t n = 0; n < in.T + in.U; ++n) {
      double mass = 0.0;
      for (std::size_t t = 0; t < in.T; ++t) {
        if (n < t || n - t > in.U) continue;
        const std::size_t u = n - t;
        mass += std::exp(r.tables.a(t, u) + r.tables.b(t, u) - total);
      }
      CHECK(std::abs(mass - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("loss is sensitive to label order") {
  Rng rng = MakeRng(3, "perm");
  int changed = 0;
  for (int i = 0; i < 20; ++i) {
    const Tensor lattice = oracle::RandomTensor(rng, {3, 3, 4});
    const std::vector<int> y{1, 3}, swapped{3, 1};
    const double a = ComputeTransducerLoss(LatticeView::Of(lattice), y).loss;
    const double b = ComputeTransducerLoss(LatticeView::Of(lattice), swapped).loss;
    if (std::abs(a - b) > 1e-9) ++changed;
  }
  CHECK(changed == 20);
}

TEST_CASE("raising a competing token never lowers the loss") {
  // Only blank and the next label advance a path, so mass moved to any other
  // token is lost. Raising blank and the next label together is the mirror
  // image of that and never raises the loss.
  Rng rng = MakeRng(4, "mono");
  for (int i = 0; i < 20; ++i) {
    Instance in = RandomInstance(rng);
    const auto r = ComputeTransducerLoss(LatticeView::Of(in.lattice), in.labels);
    for (std::size_t t = 0; t < in.T; ++t) {
      for (std::size_t u = 0; u <= in.U; ++u) {
        const std::size_t base = (t * (in.U + 1) + u) * in.V;
        const int next = u < in.U ? in.labels[u] : -1;
        double advancing = 0.0;
        for (std::size_t v = 0; v < in.V; ++v) {
          if (v == 0 || static_cast<int>(v) == next) {
            advancing += r.grad[base + v];
          } else {
            CHECK(r.grad[base + v] >= -1e-12);
          }
        }
        CHECK(advancing <= 1e-12);
        Tensor bumped = in.lattice.Clone();
        bumped.mutable_data()[base] += 1e-4;
        if (next > 0) bumped.mutable_data()[base + static_cast<std::size_t>(next)] += 1e-4;
        CHECK(ComputeTransducerLoss(LatticeView::Of(bumped), in.labels).loss - r.loss <= 1e-9);
      }
    }
  }
}

TEST_CASE("raising the next label alone can raise the loss") {
  // T=2, U=1: blank at (0,0) dominates, so the label at (0,0) competes with
  // the likely path through (1,0).
  const Tensor lattice({2, 2, 2}, {4.0, 0.0, 0.0, 0.0, 0.0, 4.0, 4.0, 0.0});
  const std::vector<int> y{1};
  const auto r = ComputeTransducerLoss(LatticeView::Of(lattice), y);
  CHECK(r.grad[1] > 0.0);
}

TEST_CASE("errors") {
  const Tensor lattice = Tensor::Zeros({2, 2, 3});
  const std::vector<int> too_long{1, 2};
  CHECK_THROWS(ComputeTransducerLoss(LatticeView::Of(lattice), too_long));
  const std::vector<int> blank{0};
  CHECK_THROWS(ComputeTransducerLoss(LatticeView::Of(lattice), blank));
  const std::vector<int> out_of_range{3};
  CHECK_THROWS(ComputeTransducerLoss(LatticeView::Of(lattice), out_of_range));
  const std::vector<int> none;
  CHECK_THROWS(ComputeTransducerLoss(LatticeView::Of(Tensor::Zeros({0, 1, 3})), none));
}

TEST_CASE("taped loss feeds gradients to the lattice") {
  Rng rng = MakeRng(5, "tape");
  Instance in = RandomInstance(rng);
  in.lattice.set_requires_grad(true);
  const auto direct = ComputeTransducerLoss(LatticeView::Of(in.lattice), in.labels);
  {
    Tape tape;
    const Tensor loss = RnntLoss(in.lattice, in.labels);
    CHECK(loss.item() == direct.loss);
    Backward(Scale(loss, 2.0));
  }
  const auto g = in.lattice.grad();
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(g[i] - 2.0 * direct.grad[i]) < 1e-15);
}

TEST_CASE("implicit acoustic model loss") {
  Rng rng = MakeRng(6, "iam");
  EncoderConfig cfg;
  cfg.vocab_size = 4;
  cfg.ae_dim = 3;
  cfg.le_dim = 3;
  cfg.joint_dim = 4;
  Parameters params;
  JointNetwork jn(params, cfg, rng);
  for (auto& [name, t] : params.entries()) {
    for (double& v : t.mutable_data()) v = Normal(rng);
  }
  const Tensor h = oracle::RandomTensor(rng, {4, 3});
  const Tensor frame_logits = jn.ImplicitAcousticLogits(h);

  // U = 0: sum of per-frame blank log-probs.
  const std::vector<int> empty;
  double expected = 0.0;
  for (std::size_t t = 0; t < 4; ++t) {
    expected -= oracle::LogSoftmaxRow(&frame_logits.data()[t * 4], 4)[0];
  }
  CHECK(std::abs(IamLoss(jn, h, empty).item() - expected) < 1e-12);

  // Rows along u share the frame's logits.
  const Tensor repeated = RepeatOverPositions(frame_logits, 3);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t u = 0; u < 3; ++u) {
      for (std::size_t v = 0; v < 4; ++v) {
        CHECK(repeated[(t * 3 + u) * 4 + v] == frame_logits[t * 4 + v]);
      }
    }
  }

  const std::vector<int> y{2, 1};
  const double brute = oracle::BruteForceTransducerLoss(Values(repeated), 4, 2, 4, y);
  CHECK(std::abs(IamLoss(jn, h, std::vector<int>{2, 1, 3}).item() -
                 oracle::BruteForceTransducerLoss(Values(RepeatOverPositions(frame_logits, 4)), 4, 3, 4,
                                                  {2, 1, 3})) < 1e-9);
  CHECK(std::abs(IamLoss(jn, h, y).item() - brute) < 1e-9);

  // Gradient through the joint network.
  params.ZeroGrad();
  {
    Tape tape;
    Backward(IamLoss(jn, h, y));
  }
  for (auto& [name, t] : params.entries()) {
    const auto numeric =
        oracle::NumericGradient([&] { return IamLoss(jn, h, y).item(); }, t.mutable_data());
    INFO(name);
    CHECK(oracle::MaxRelativeError(t.grad(), numeric) < 1e-4);
  }
}
