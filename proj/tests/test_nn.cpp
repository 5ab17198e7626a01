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
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "lat/nn.hpp"
#include "oracles.hpp"

using namespace lat;

namespace {

EncoderConfig SmallConfig() {
  EncoderConfig cfg;
  cfg.feat_dim = 3;
  cfg.vocab_size = 5;
  cfg.ae_dim = 4;
  cfg.le_embed_dim = 3;
  cfg.le_dim = 4;
  cfg.joint_dim = 5;
  return cfg;
}

bool SameRows(const Tensor& a, const Tensor& b, std::size_t rows) {
  const std::size_t width = a.dim(1);
  for (std::size_t i = 0; i < rows * width; ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

// Random values for every parameter, biases included.
void Randomize(Parameters& params, Rng& rng) {
  for (auto& [name, t] : params.entries()) {
    for (double& v : t.mutable_data()) v = 0.5 * Normal(rng);
  }
}

}  // namespace

TEST_CASE("vocabulary file") {
  const auto path = std::filesystem::temp_directory_path() / "lat_vocab_test.txt";
  Vocabulary({"<b>", "a", "b"}).Save(path);
  const Vocabulary v = Vocabulary::Load(path);
  CHECK(v.size() == 3);
  CHECK(v.id("b") == 2);
  CHECK(v.blank_id() == 0);
  CHECK_THROWS(Vocabulary({"a", "<b>"}));
  CHECK_THROWS(Vocabulary({"<b>", "a", "a"}));
  std::filesystem::remove(path);
}

TEST_CASE("acoustic encoder shapes and causality") {
  Rng rng = MakeRng(1, "ae");
  for (std::size_t layers : {1, 2}) {
    for (std::size_t down : {1, 2}) {
      EncoderConfig cfg = SmallConfig();
      cfg.ae_layers = layers;
      cfg.downsample = down;
      Parameters params;
      AcousticEncoder ae(params, cfg, rng);

      CHECK(ae.Encode(oracle::RandomTensor(rng, {1, 3})).dim(0) == 1);

      const Tensor x = oracle::RandomTensor(rng, {7, 3});
      const Tensor h = ae.Encode(x);
      CHECK(h.dim(0) == (7 + down - 1) / down);
      CHECK(h.dim(1) == 4);

      // Prefix property: encoding x[0..t] reproduces the first rows exactly.
      for (std::size_t t = 1; t <= 7; ++t) {
        const Tensor hp = ae.Encode(Slice(x, 0, 0, t));
        CHECK(SameRows(hp, h, hp.dim(0)));
      }
      // Perturbing frame t+1 leaves rows depending on frames <= t unchanged.
      for (std::size_t t = 0; t + 1 < 7; ++t) {
        Tensor xp = x.Clone();
        xp.mutable_data()[(t + 1) * 3] += 1.0;
        const Tensor hp = ae.Encode(xp);
        CHECK(SameRows(hp, h, t / down + 1));
      }
      CHECK_THROWS_AS(ae.Encode(Tensor::Zeros({4, 2})), DimensionError);
    }
  }
}

TEST_CASE("zero input is deterministic") {
  Rng rng = MakeRng(2, "ae0");
  Parameters params;
  AcousticEncoder ae(params, SmallConfig(), rng);
  const Tensor a = ae.Encode(Tensor::Zeros({3, 3}));
  const Tensor b = ae.Encode(Tensor::Zeros({3, 3}));
  CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
}

TEST_CASE("non-causal encoder sees the future") {
  Rng rng = MakeRng(3, "bi");
  EncoderConfig cfg = SmallConfig();
  cfg.causal = false;
  Parameters params;
  AcousticEncoder ae(params, cfg, rng);
  const Tensor x = oracle::RandomTensor(rng, {4, 3});
  const Tensor h = ae.Encode(x);
  CHECK(h.dim(1) == 8);
  Tensor xp = x.Clone();
  xp.mutable_data()[3 * 3] += 1.0;
  CHECK_FALSE(SameRows(ae.Encode(xp), h, 1));
}

TEST_CASE("text encoder") {
  Rng rng = MakeRng(4, "le");
  Parameters params;
  TextEncoder le(params, SmallConfig(), rng);
  CHECK(le.Encode({}).dim(0) == 1);

  const std::vector<int> y{1, 3, 2, 4};
  const Tensor g = le.Encode(y);
  CHECK(g.dim(0) == 5);
  for (std::size_t u = 0; u <= y.size(); ++u) {
    const Tensor gp = le.Encode(std::span<const int>(y).subspan(0, u));
    CHECK(SameRows(gp, g, u + 1));
  }
  // Perturbing token u leaves rows <= u unchanged.
  for (std::size_t u = 0; u < y.size(); ++u) {
    std::vector<int> yp = y;
    yp[u] = yp[u] == 1 ? 2 : 1;
    const Tensor gp = le.Encode(yp);
    CHECK(SameRows(gp, g, u + 1));
    CHECK_FALSE(SameRows(gp, g, u + 2));
  }
  // Same last token, different history.
  const std::vector<int> a{1, 3}, b{2, 3};
  CHECK_FALSE(SameRows(Slice(le.Encode(a), 0, 2, 3), Slice(le.Encode(b), 0, 2, 3), 1));

  // Incremental steps agree with the batch encoding.
  TextState s = le.Start();
  CHECK(SameRows(s.output, g, 1));
  for (std::size_t u = 0; u < y.size(); ++u) {
    s = le.Step(s, y[u]);
    CHECK(SameRows(s.output, Slice(g, 0, u + 1, u + 2), 1));
  }

  const std::vector<int> with_blank{1, 0};
  CHECK_THROWS(le.Encode(with_blank));
}

TEST_CASE("joint network formula") {
  Rng rng = MakeRng(5, "jn");
  const EncoderConfig cfg = SmallConfig();
  Parameters params;
  JointNetwork jn(params, cfg, rng);
  Randomize(params, rng);

  const Tensor h = oracle::RandomTensor(rng, {1, 4});
  const Tensor g = oracle::RandomTensor(rng, {1, 4});
  const Tensor logits = jn.Logits(h, g);

  // Independent re-implementation.
  auto P = [&](const char* n) { return params.Get(n); };
  const Tensor wa = P("joint.ae_proj"), ba = P("joint.ae_bias"), wg = P("joint.le_proj"),
               bg = P("joint.le_bias"), wo = P("joint.out_proj"), bo = P("joint.out_bias");
  std::vector<double> hidden(cfg.joint_dim);
  for (std::size_t j = 0; j < cfg.joint_dim; ++j) {
    double s = ba[j] + bg[j];
    for (std::size_t i = 0; i < 4; ++i) {
      s += h[i] * wa[i * cfg.joint_dim + j] + g[i] * wg[i * cfg.joint_dim + j];
    }
    hidden[j] = std::tanh(s);
  }
  for (std::size_t v = 0; v < cfg.vocab_size; ++v) {
    double s = bo[v];
    for (std::size_t j = 0; j < cfg.joint_dim; ++j) s += hidden[j] * wo[j * cfg.vocab_size + v];
    CHECK(std::abs(logits[v] - s) < 1e-12);
  }

  // joint(h, 0) is the implicit acoustic model row.
  const Tensor iam = jn.ImplicitAcousticLogits(h);
  const Tensor zero = jn.Logits(h, Tensor::Zeros({1, 4}));
  CHECK(std::equal(iam.data().begin(), iam.data().end(), zero.data().begin()));

  CHECK_THROWS_AS(jn.Logits(Tensor::Zeros({1, 3}), g), DimensionError);
}

TEST_CASE("joint with tied projections is symmetric") {
  Rng rng = MakeRng(6, "tied");
  Parameters params;
  JointNetwork jn(params, SmallConfig(), rng);
  Randomize(params, rng);
  Tensor le = params.Get("joint.le_proj");
  Tensor lb = params.Get("joint.le_bias");
  std::copy(params.Get("joint.ae_proj").data().begin(), params.Get("joint.ae_proj").data().end(),
            le.mutable_data().begin());
  std::copy(params.Get("joint.ae_bias").data().begin(), params.Get("joint.ae_bias").data().end(),
            lb.mutable_data().begin());
  const Tensor a = oracle::RandomTensor(rng, {1, 4});
  const Tensor b = oracle::RandomTensor(rng, {1, 4});
  const Tensor ab = jn.Logits(a, b), ba = jn.Logits(b, a);
  for (std::size_t v = 0; v < ab.size(); ++v) CHECK(std::abs(ab[v] - ba[v]) < 1e-14);
}

TEST_CASE("lattice cells equal single-cell joint") {
  Rng rng = MakeRng(7, "lat");
  Parameters params;
  JointNetwork jn(params, SmallConfig(), rng);
  Randomize(params, rng);
  const Tensor h = oracle::RandomTensor(rng, {3, 4});
  const Tensor g = oracle::RandomTensor(rng, {2, 4});
  const Tensor lattice = jn.Lattice(h, g);
  CHECK(lattice.shape() == Shape{3, 2, 5});
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t u = 0; u < 2; ++u) {
      const Tensor cell = jn.Logits(Slice(h, 0, t, t + 1), Slice(g, 0, u, u + 1));
      for (std::size_t v = 0; v < 5; ++v) CHECK(lattice[(t * 2 + u) * 5 + v] == cell[v]);
    }
  }
}

TEST_CASE("end-to-end gradients through encoders and joint") {
  Rng rng = MakeRng(8, "e2e");
  for (bool causal : {true, false}) {
    EncoderConfig cfg = SmallConfig();
    cfg.causal = causal;
    cfg.ae_layers = 2;
    cfg.downsample = causal ? 2 : 1;
    Parameters params;
    AcousticEncoder ae(params, cfg, rng);
    TextEncoder le(params, cfg, rng);
    JointNetwork jn(params, cfg, rng);
    Randomize(params, rng);
    const Tensor x = oracle::RandomTensor(rng, {4, 3});
    const std::vector<int> y{2, 1};
    const Tensor weights = oracle::RandomTensor(rng, {(4 + cfg.downsample - 1) / cfg.downsample, 3, 5});
    auto loss = [&] { return Sum(Mul(Tanh(jn.Lattice(ae.Encode(x), le.Encode(y))), weights)); };
    params.ZeroGrad();
    {
      Tape tape;
      Backward(loss());
    }
    for (auto& [name, t] : params.entries()) {
      const auto analytic = t.grad();
      const auto numeric = oracle::NumericGradient([&] { return loss().item(); }, t.mutable_data());
      INFO(name);
      CHECK(oracle::MaxRelativeError(analytic, numeric) < 1e-4);
    }
  }
}
