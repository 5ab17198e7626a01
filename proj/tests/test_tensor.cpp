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
#include <vector>

#include "doctest.h"
#include "lat/checkpoint.hpp"
#include "lat/tensor.hpp"
#include "oracles.hpp"

using namespace lat;

namespace {

void CheckValues(const Tensor& t, const std::vector<double>& expected, double tol = 0.0) {
  REQUIRE(t.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(std::abs(t[i] - expected[i]) <= tol);
  }
}

// Compares tape gradients of `loss_fn` w.r.t. every input against central
// differences.
void CheckGradients(std::vector<Tensor> inputs, const std::function<Tensor()>& loss_fn) {
  for (auto& in : inputs) {
    in.set_requires_grad(true);
    in.ZeroGrad();
  }
  {
    Tape tape;
    Backward(loss_fn());
  }
  for (auto& in : inputs) {
    const std::vector<double> analytic = in.grad();
    const auto numeric = oracle::NumericGradient([&] { return loss_fn().item(); },
                                                 in.mutable_data());
    CHECK(oracle::MaxRelativeError(analytic, numeric) < 1e-4);
  }
}

}  // namespace

TEST_CASE("matmul identity and scalar") {
  const Tensor eye = Tensor::Matrix({{1, 0}, {0, 1}});
  const Tensor b = Tensor::Matrix({{5, 6}, {7, 8}});
  CheckValues(MatMul(eye, b), {5, 6, 7, 8});
  CheckValues(MatMul(Tensor::Matrix({{2}}), Tensor::Matrix({{3}})), {6});
}

TEST_CASE("matmul matches triple loop") {
  Rng rng = MakeRng(7, "matmul");
  const Tensor a = oracle::RandomTensor(rng, {3, 4});
  const Tensor b = oracle::RandomTensor(rng, {4, 2});
  const Tensor c = MatMul(a, b);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += a[i * 4 + k] * b[k * 2 + j];
      CHECK(std::abs(c[i * 2 + j] - s) < 1e-12);
    }
  }
}

TEST_CASE("matmul shape mismatch") {
  CHECK_THROWS_AS(MatMul(Tensor::Zeros({2, 3}), Tensor::Zeros({2, 3})), DimensionError);
  CHECK_THROWS_AS(MatMul(Tensor::Zeros({3}), Tensor::Zeros({3, 1})), DimensionError);
}

TEST_CASE("log_softmax") {
  CheckValues(LogSoftmax(Tensor::Vector({0, 0})), {-std::log(2.0), -std::log(2.0)}, 1e-15);

  const Tensor big = LogSoftmax(Tensor::Vector({1000, 0}));
  CHECK(std::abs(big[0]) < 1e-12);
  CHECK(std::abs(big[1] + 1000.0) < 1e-9);

  const Tensor r = LogSoftmax(Tensor::Vector({1, 2, 3}));
  const double z = std::log(std::exp(1.0) + std::exp(2.0) + std::exp(3.0));
  CheckValues(r, {1 - z, 2 - z, 3 - z}, 1e-12);

  CHECK_THROWS_AS(LogSoftmax(Tensor::Zeros({2, 0})), DimensionError);

  Rng rng = MakeRng(1, "lsm");
  const Tensor rows = LogSoftmax(oracle::RandomTensor(rng, {4, 5}, 3.0));
  for (std::size_t r = 0; r < 4; ++r) {
    double s = 0.0;
    for (std::size_t v = 0; v < 5; ++v) s += std::exp(rows[r * 5 + v]);
    CHECK(std::abs(s - 1.0) < 1e-9);
  }
}

TEST_CASE("backward simple losses") {
  Rng rng = MakeRng(2, "bw");
  Tensor x = oracle::RandomTensor(rng, {2, 3}, 1.0, true);
  {
    Tape tape;
    Backward(Sum(x));
  }
  for (double g : x.grad()) CHECK(g == 1.0);

  x.ZeroGrad();
  {
    Tape tape;
    Backward(Scale(Sum(Mul(x, x)), 0.5));
  }
  const auto g = x.grad();
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(g[i] - x[i]) < 1e-15);
}

TEST_CASE("backward errors") {
  Tensor x = Tensor::Full({2}, 1.0, true);
  Tape tape;
  CHECK_THROWS_AS(Backward(Mul(x, x)), GraphError);  // not scalar
  CHECK_THROWS_AS(Backward(Sum(Tensor::Full({2}, 1.0))), GraphError);  // nothing recorded
}

TEST_CASE("no recording without a tape") {
  Tensor x = Tensor::Full({2}, 1.0, true);
  const Tensor y = Sum(x);
  CHECK_FALSE(y.requires_grad());
  Tape tape;
  CHECK_THROWS_AS(Backward(y), GraphError);
}

TEST_CASE("gradients accumulate until zeroed") {
  Tensor x = Tensor::Vector({1.0, 2.0});
  x.set_requires_grad(true);
  for (int i = 0; i < 2; ++i) {
    Tape tape;
    Backward(Sum(x));
  }
  CHECK(x.grad() == std::vector<double>{2.0, 2.0});
  x.ZeroGrad();
  CHECK(x.grad() == std::vector<double>{0.0, 0.0});
}

TEST_CASE("non-finite values are errors") {
  CHECK_THROWS_AS(Mul(Tensor::Vector({1e200}), Tensor::Vector({1e200})), NumericError);
}

TEST_CASE("primitive gradients match finite differences") {
  Rng rng = MakeRng(3, "fd");
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t m = 1 + rng() % 4, k = 1 + rng() % 5, n = 1 + rng() % 4;
    Tensor a = oracle::RandomTensor(rng, {m, k});
    Tensor b = oracle::RandomTensor(rng, {k, n});
    Tensor c = oracle::RandomTensor(rng, {m, k});
    Tensor bias = oracle::RandomTensor(rng, {1, k});
    Tensor w = oracle::RandomTensor(rng, {m, k});  // fixed weights to make losses non-trivial
    auto weighted = [&](const Tensor& t) {
      return Sum(Mul(t, Tensor(t.shape(), std::vector<double>(w.data().begin(), w.data().end()))));
    };

    CheckGradients({a, b}, [&] { return Sum(Tanh(MatMul(a, b))); });
    CheckGradients({a, c}, [&] { return weighted(Add(a, Mul(a, c))); });
    CheckGradients({a, c}, [&] { return weighted(Sub(Sigmoid(a), Scale(c, 0.3))); });
    CheckGradients({a}, [&] { return weighted(LogSoftmax(a)); });
    CheckGradients({a, bias}, [&] { return weighted(BroadcastAdd(a, bias)); });
    CheckGradients({a, c}, [&] {
      const Tensor parts[] = {a, c};
      return Sum(Tanh(Concat(parts)));
    });
    CheckGradients({a, c}, [&] {
      const Tensor parts[] = {a, c};
      return Sum(Sigmoid(ConcatRows(parts)));
    });
    CheckGradients({a}, [&] { return Mean(Tanh(Slice(a, 1, 0, (k + 1) / 2))); });
    CheckGradients({a}, [&] { return Sum(Tanh(Reshape(a, {k, m}))); });
  }
}

TEST_CASE("embedding gradient and bounds") {
  Rng rng = MakeRng(4, "emb");
  Tensor table = oracle::RandomTensor(rng, {5, 3});
  const std::vector<int> ids{1, 3, 1, 0};
  CheckGradients({table}, [&] { return Sum(Tanh(Embedding(table, ids))); });
  const std::vector<int> bad{5};
  CHECK_THROWS_AS(Embedding(table, bad), DimensionError);
}

TEST_CASE("broadcast add shapes") {
  const Tensor a = Tensor::Zeros({2, 1, 3});
  const Tensor b = Tensor::Full({1, 4, 3}, 1.0);
  const Tensor c = BroadcastAdd(a, b);
  CHECK(c.shape() == Shape{2, 4, 3});
  CHECK_THROWS_AS(BroadcastAdd(Tensor::Zeros({2, 3}), Tensor::Zeros({3, 2})), DimensionError);
  CHECK_THROWS_AS(BroadcastAdd(Tensor::Zeros({2, 3}), Tensor::Zeros({3})), DimensionError);
}

TEST_CASE("same seed gives identical buffers") {
  Rng r1 = MakeRng(11, "x"), r2 = MakeRng(11, "x");
  const Tensor a = oracle::RandomTensor(r1, {4, 4});
  const Tensor b = oracle::RandomTensor(r2, {4, 4});
  CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
}

TEST_CASE("checkpoint round trip") {
  const auto path = std::filesystem::temp_directory_path() / "lat_ckpt_test.bin";
  NamedTensors in{{"a", Tensor::Matrix({{1.5, -2}, {3, 4}})}, {"scalar", Tensor::Scalar(7.25)}};
  WriteCheckpoint(path, in);
  const NamedTensors out = ReadCheckpoint(path);
  REQUIRE(out.size() == 2);
  CHECK(out[0].first == "a");
  CHECK(out[0].second.shape() == Shape{2, 2});
  CHECK(out[0].second[1] == -2.0);
  CHECK(out[1].second.shape().empty());
  CHECK(out[1].second.item() == 7.25);

  {
    std::ofstream bad(path, std::ios::binary);
    bad << "NOTACKPT";
  }
  CHECK_THROWS(ReadCheckpoint(path));
  std::filesystem::remove(path);
}
