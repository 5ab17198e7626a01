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

#include "lat/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lat {

namespace {

thread_local Tape* g_active_tape = nullptr;

void RequireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         ShapeToString(a.shape()) + " vs " +
                         ShapeToString(b.shape()));
  }
}

// Splits `shape` around `axis` into (outer, axis extent, inner).
struct AxisSplit {
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;
};

AxisSplit SplitAt(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

// c (m x n) += a (m x k) * b (k x n)
void GemmAccumulate(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    const double* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// c (m x n) += a (m x k) * b^T, b is (n x k)
void GemmAccumulateBT(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] += acc;
    }
  }
}

// c (k x n) += a^T * g, a is (m x k), g is (m x n)
void GemmAccumulateAT(const double* a, const double* g, double* c,
                      std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    const double* grow = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      double* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * grow[j];
    }
  }
}

}  // namespace

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t NumElements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::span<double> detail::Node::GradBuffer() {
  if (grad.empty()) grad.assign(value.size(), 0.0);
  return grad;
}

// ---------------------------------------------------------------- Tensor

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad) {
  if (NumElements(shape) != data.size()) {
    throw DimensionError("tensor: shape " + ShapeToString(shape) + " holds " +
                         std::to_string(NumElements(shape)) +
                         " values, got " + std::to_string(data.size()));
  }
  node_ = std::make_shared<detail::Node>();
  node_->shape = std::move(shape);
  node_->value = std::move(data);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  return Full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::Full(Shape shape, double value, bool requires_grad) {
  const std::size_t n = NumElements(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::Scalar(double value) { return Tensor({}, {value}); }

Tensor Tensor::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t m = rows.size();
  const std::size_t n = m ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(m * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw DimensionError("Matrix: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({m, n}, std::move(data));
}

Tensor Tensor::Vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

const Shape& Tensor::shape() const { return node_->shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= rank()) throw DimensionError("dim: axis out of range");
  return node_->shape[axis];
}

std::size_t Tensor::size() const { return node_->value.size(); }

std::span<const double> Tensor::data() const { return node_->value; }

std::span<double> Tensor::mutable_data() { return node_->value; }

double Tensor::item() const {
  if (size() != 1) {
    throw DimensionError("item: tensor of shape " + ShapeToString(shape()) +
                         " is not a scalar");
  }
  return node_->value[0];
}

bool Tensor::requires_grad() const { return node_->requires_grad; }

void Tensor::set_requires_grad(bool value) { node_->requires_grad = value; }

std::vector<double> Tensor::grad() const {
  if (node_->grad.empty()) return std::vector<double>(size(), 0.0);
  return node_->grad;
}

bool Tensor::has_grad() const { return !node_->grad.empty(); }

void Tensor::ZeroGrad() {
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::Clone() const {
  Tensor out(shape(), node_->value, requires_grad());
  return out;
}

Tensor Tensor::Detach() const { return Tensor(shape(), node_->value, false); }

// ---------------------------------------------------------------- Tape

Tape::Tape() : previous_(g_active_tape) { g_active_tape = this; }

Tape::~Tape() {
  for (auto& node : nodes_) node->tape = nullptr;
  g_active_tape = previous_;
}

Tape* Tape::Active() { return g_active_tape; }

Tensor MakeResult(Shape shape, std::vector<double> value,
                  std::span<const Tensor> inputs,
                  std::function<void(detail::Node&)> backward) {
  for (double v : value) {
    if (!std::isfinite(v)) {
      throw NumericError("non-finite value produced by op with output shape " +
                         ShapeToString(shape));
    }
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->leaf = false;
  Tape* tape = Tape::Active();
  if (tape != nullptr) {
    const bool needs = std::any_of(inputs.begin(), inputs.end(),
                                   [](const Tensor& t) { return t.requires_grad(); });
    if (needs) {
      node->requires_grad = true;
      node->backward = std::move(backward);
      node->tape = tape;
      tape->nodes_.push_back(node);
    }
  }
  return Tensor(std::move(node));
}

void AccumulateGrad(const Tensor& t, std::span<const double> values) {
  if (!t.requires_grad()) return;
  auto* node = const_cast<detail::Node*>(t.node());
  auto g = node->GradBuffer();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += values[i];
}

void Backward(const Tensor& loss) {
  if (!loss.defined()) throw GraphError("backward: undefined tensor");
  if (loss.size() != 1) {
    throw GraphError("backward: loss must be scalar, got shape " +
                     ShapeToString(loss.shape()));
  }
  Tape* tape = Tape::Active();
  const detail::Node* root = loss.node();
  if (tape == nullptr || root->tape != tape) {
    throw GraphError("backward: loss is not recorded on the active tape");
  }
  auto& nodes = tape->nodes_;
  auto it = std::find_if(nodes.rbegin(), nodes.rend(),
                         [root](const auto& n) { return n.get() == root; });
  const_cast<detail::Node*>(root)->GradBuffer()[0] += 1.0;
  for (; it != nodes.rend(); ++it) {
    detail::Node& node = **it;
    if (node.grad.empty() || !node.backward) continue;
    node.backward(node);
  }
  for (auto& node : nodes) {
    node->tape = nullptr;
    node->backward = nullptr;
  }
  nodes.clear();
}

// ---------------------------------------------------------------- ops

Tensor Add(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "add");
  std::vector<double> out(a.size());
  auto x = a.data(), y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  return MakeResult(a.shape(), std::move(out), {a, b},
                    [a, b](detail::Node& self) {
                      AccumulateGrad(a, self.grad);
                      AccumulateGrad(b, self.grad);
                    });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "sub");
  std::vector<double> out(a.size());
  auto x = a.data(), y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
  return MakeResult(a.shape(), std::move(out), {a, b},
                    [a, b](detail::Node& self) {
                      AccumulateGrad(a, self.grad);
                      if (b.requires_grad()) {
                        std::vector<double> neg(self.grad.size());
                        for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -self.grad[i];
                        AccumulateGrad(b, neg);
                      }
                    });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "mul");
  std::vector<double> out(a.size());
  auto x = a.data(), y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
  return MakeResult(a.shape(), std::move(out), {a, b},
                    [a, b](detail::Node& self) {
                      const auto& g = self.grad;
                      if (a.requires_grad()) {
                        std::vector<double> ga(g.size());
                        auto y = b.data();
                        for (std::size_t i = 0; i < g.size(); ++i) ga[i] = g[i] * y[i];
                        AccumulateGrad(a, ga);
                      }
                      if (b.requires_grad()) {
                        std::vector<double> gb(g.size());
                        auto x = a.data();
                        for (std::size_t i = 0; i < g.size(); ++i) gb[i] = g[i] * x[i];
                        AccumulateGrad(b, gb);
                      }
                    });
}

Tensor Scale(const Tensor& a, double factor) {
  std::vector<double> out(a.data().begin(), a.data().end());
  for (double& v : out) v *= factor;
  return MakeResult(a.shape(), std::move(out), {a},
                    [a, factor](detail::Node& self) {
                      std::vector<double> g(self.grad);
                      for (double& v : g) v *= factor;
                      AccumulateGrad(a, g);
                    });
}

namespace {

struct BroadcastPlan {
  Shape out_shape;
  std::vector<std::size_t> a_strides;  // 0 on broadcast axes
  std::vector<std::size_t> b_strides;
};

BroadcastPlan PlanBroadcast(const Shape& sa, const Shape& sb) {
  if (sa.size() != sb.size()) {
    throw DimensionError("broadcast_add: rank mismatch " + ShapeToString(sa) +
                         " vs " + ShapeToString(sb));
  }
  const std::size_t r = sa.size();
  BroadcastPlan plan;
  plan.out_shape.resize(r);
  plan.a_strides.assign(r, 0);
  plan.b_strides.assign(r, 0);
  std::size_t stride_a = 1, stride_b = 1;
  for (std::size_t i = r; i-- > 0;) {
    if (sa[i] != sb[i] && sa[i] != 1 && sb[i] != 1) {
      throw DimensionError("broadcast_add: incompatible " + ShapeToString(sa) +
                           " vs " + ShapeToString(sb));
    }
    plan.out_shape[i] = std::max(sa[i], sb[i]);
    plan.a_strides[i] = sa[i] == 1 ? 0 : stride_a;
    plan.b_strides[i] = sb[i] == 1 ? 0 : stride_b;
    stride_a *= sa[i];
    stride_b *= sb[i];
  }
  return plan;
}

// Calls fn(out_index, a_index, b_index) over the output in row-major order.
template <typename Fn>
void ForEachBroadcast(const BroadcastPlan& plan, Fn&& fn) {
  const std::size_t r = plan.out_shape.size();
  const std::size_t n = NumElements(plan.out_shape);
  if (n == 0) return;
  std::vector<std::size_t> idx(r, 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t o = 0; o < n; ++o) {
    fn(o, ia, ib);
    for (std::size_t d = r; d-- > 0;) {
      ++idx[d];
      ia += plan.a_strides[d];
      ib += plan.b_strides[d];
      if (idx[d] < plan.out_shape[d]) break;
      ia -= plan.a_strides[d] * idx[d];
      ib -= plan.b_strides[d] * idx[d];
      idx[d] = 0;
    }
  }
}

}  // namespace

Tensor BroadcastAdd(const Tensor& a, const Tensor& b) {
  BroadcastPlan plan = PlanBroadcast(a.shape(), b.shape());
  std::vector<double> out(NumElements(plan.out_shape));
  auto x = a.data(), y = b.data();
  ForEachBroadcast(plan, [&](std::size_t o, std::size_t ia, std::size_t ib) {
    out[o] = x[ia] + y[ib];
  });
  Shape shape = plan.out_shape;
  return MakeResult(std::move(shape), std::move(out), {a, b},
                    [a, b, plan](detail::Node& self) {
                      std::vector<double> ga(a.requires_grad() ? a.size() : 0);
                      std::vector<double> gb(b.requires_grad() ? b.size() : 0);
                      const auto& g = self.grad;
                      ForEachBroadcast(plan, [&](std::size_t o, std::size_t ia,
                                                 std::size_t ib) {
                        if (!ga.empty()) ga[ia] += g[o];
                        if (!gb.empty()) gb[ib] += g[o];
                      });
                      if (!ga.empty()) AccumulateGrad(a, ga);
                      if (!gb.empty()) AccumulateGrad(b, gb);
                    });
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: cannot multiply " + ShapeToString(a.shape()) +
                         " by " + ShapeToString(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n, 0.0);
  GemmAccumulate(a.data().data(), b.data().data(), out.data(), m, k, n);
  return MakeResult({m, n}, std::move(out), {a, b},
                    [a, b, m, k, n](detail::Node& self) {
                      if (a.requires_grad()) {
                        std::vector<double> ga(m * k, 0.0);
                        GemmAccumulateBT(self.grad.data(), b.data().data(),
                                         ga.data(), m, n, k);
                        AccumulateGrad(a, ga);
                      }
                      if (b.requires_grad()) {
                        std::vector<double> gb(k * n, 0.0);
                        GemmAccumulateAT(a.data().data(), self.grad.data(),
                                         gb.data(), m, k, n);
                        AccumulateGrad(b, gb);
                      }
                    });
}

Tensor Tanh(const Tensor& a) {
  std::vector<double> out(a.size());
  auto x = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(x[i]);
  return MakeResult(a.shape(), std::move(out), {a}, [a](detail::Node& self) {
    std::vector<double> g(self.grad.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double y = self.value[i];
      g[i] = self.grad[i] * (1.0 - y * y);
    }
    AccumulateGrad(a, g);
  });
}

Tensor Sigmoid(const Tensor& a) {
  std::vector<double> out(a.size());
  auto x = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Split by sign so exp never overflows.
    out[i] = x[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-x[i]))
                         : std::exp(x[i]) / (1.0 + std::exp(x[i]));
  }
  return MakeResult(a.shape(), std::move(out), {a}, [a](detail::Node& self) {
    std::vector<double> g(self.grad.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double y = self.value[i];
      g[i] = self.grad[i] * y * (1.0 - y);
    }
    AccumulateGrad(a, g);
  });
}

Tensor LogSoftmax(const Tensor& a) {
  if (a.rank() == 0 || a.shape().back() == 0) {
    throw DimensionError("log_softmax: empty last dimension");
  }
  const std::size_t v = a.shape().back();
  const std::size_t rows = a.size() / v;
  std::vector<double> out(a.size());
  auto x = a.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = x.data() + r * v;
    double* o = out.data() + r * v;
    const double mx = *std::max_element(in, in + v);
    double s = 0.0;
    for (std::size_t j = 0; j < v; ++j) s += std::exp(in[j] - mx);
    const double lse = mx + std::log(s);
    for (std::size_t j = 0; j < v; ++j) o[j] = in[j] - lse;
  }
  return MakeResult(a.shape(), std::move(out), {a},
                    [a, v, rows](detail::Node& self) {
                      std::vector<double> g(self.grad.size());
                      for (std::size_t r = 0; r < rows; ++r) {
                        const double* gy = self.grad.data() + r * v;
                        const double* y = self.value.data() + r * v;
                        double total = 0.0;
                        for (std::size_t j = 0; j < v; ++j) total += gy[j];
                        for (std::size_t j = 0; j < v; ++j) {
                          g[r * v + j] = gy[j] - std::exp(y[j]) * total;
                        }
                      }
                      AccumulateGrad(a, g);
                    });
}

Tensor Concat(std::span<const Tensor> parts) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  const Shape& first = parts[0].shape();
  if (first.empty()) throw DimensionError("concat: scalar input");
  const std::size_t r = first.size();
  const std::size_t rows = parts[0].size() / first.back();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    const Shape& s = p.shape();
    if (s.size() != r || !std::equal(s.begin(), s.end() - 1, first.begin())) {
      throw DimensionError("concat: leading axes differ " + ShapeToString(first) +
                           " vs " + ShapeToString(s));
    }
    widths.push_back(s.back());
    total += s.back();
  }
  std::vector<double> out(rows * total);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto x = parts[i].data();
    for (std::size_t row = 0; row < rows; ++row) {
      std::copy_n(x.data() + row * widths[i], widths[i],
                  out.data() + row * total + offset);
    }
    offset += widths[i];
  }
  Shape shape = first;
  shape.back() = total;
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  auto backward = [inputs, widths, rows, total](detail::Node& self) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (inputs[i].requires_grad()) {
        std::vector<double> g(rows * widths[i]);
        for (std::size_t row = 0; row < rows; ++row) {
          std::copy_n(self.grad.data() + row * total + off, widths[i],
                      g.data() + row * widths[i]);
        }
        AccumulateGrad(inputs[i], g);
      }
      off += widths[i];
    }
  };
  return MakeResult(std::move(shape), std::move(out), inputs, backward);
}

Tensor ConcatRows(std::span<const Tensor> parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no inputs");
  const Shape& first = parts[0].shape();
  if (first.empty()) throw DimensionError("concat_rows: scalar input");
  std::size_t total_rows = 0;
  std::vector<double> out;
  for (const Tensor& p : parts) {
    const Shape& s = p.shape();
    if (s.size() != first.size() || !std::equal(s.begin() + 1, s.end(), first.begin() + 1)) {
      throw DimensionError("concat_rows: trailing axes differ " +
                           ShapeToString(first) + " vs " + ShapeToString(s));
    }
    total_rows += s[0];
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  Shape shape = first;
  shape[0] = total_rows;
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  auto backward = [inputs](detail::Node& self) {
    std::size_t off = 0;
    for (const Tensor& t : inputs) {
      if (t.requires_grad()) {
        AccumulateGrad(t, std::span<const double>(self.grad.data() + off, t.size()));
      }
      off += t.size();
    }
  };
  return MakeResult(std::move(shape), std::move(out), inputs, backward);
}

Tensor Slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end) {
  if (axis >= a.rank()) throw DimensionError("slice: axis out of range");
  if (begin > end || end > a.dim(axis)) {
    throw DimensionError("slice: range [" + std::to_string(begin) + ", " +
                         std::to_string(end) + ") outside axis of extent " +
                         std::to_string(a.dim(axis)));
  }
  const AxisSplit s = SplitAt(a.shape(), axis);
  const std::size_t width = end - begin;
  std::vector<double> out(s.outer * width * s.inner);
  auto x = a.data();
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(x.data() + (o * s.extent + begin) * s.inner, width * s.inner,
                out.data() + o * width * s.inner);
  }
  Shape shape = a.shape();
  shape[axis] = width;
  return MakeResult(std::move(shape), std::move(out), {a},
                    [a, s, begin, width](detail::Node& self) {
                      std::vector<double> g(a.size(), 0.0);
                      for (std::size_t o = 0; o < s.outer; ++o) {
                        std::copy_n(self.grad.data() + o * width * s.inner,
                                    width * s.inner,
                                    g.data() + (o * s.extent + begin) * s.inner);
                      }
                      AccumulateGrad(a, g);
                    });
}

Tensor Reshape(const Tensor& a, Shape shape) {
  if (NumElements(shape) != a.size()) {
    throw DimensionError("reshape: " + ShapeToString(a.shape()) + " to " +
                         ShapeToString(shape));
  }
  std::vector<double> out(a.data().begin(), a.data().end());
  return MakeResult(std::move(shape), std::move(out), {a},
                    [a](detail::Node& self) { AccumulateGrad(a, self.grad); });
}

Tensor Embedding(const Tensor& table, std::span<const int> ids) {
  if (table.rank() != 2) throw DimensionError("embedding: table must be 2-D");
  const std::size_t vocab = table.dim(0), width = table.dim(1);
  std::vector<double> out(ids.size() * width);
  auto x = table.data();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab) {
      throw DimensionError("embedding: id " + std::to_string(ids[i]) +
                           " outside table of " + std::to_string(vocab) + " rows");
    }
    std::copy_n(x.data() + ids[i] * width, width, out.data() + i * width);
  }
  std::vector<int> rows(ids.begin(), ids.end());
  return MakeResult({ids.size(), width}, std::move(out), {table},
                    [table, rows, width](detail::Node& self) {
                      std::vector<double> g(table.size(), 0.0);
                      for (std::size_t i = 0; i < rows.size(); ++i) {
                        for (std::size_t j = 0; j < width; ++j) {
                          g[rows[i] * width + j] += self.grad[i * width + j];
                        }
                      }
                      AccumulateGrad(table, g);
                    });
}

Tensor Sum(const Tensor& a) {
  double total = 0.0;
  for (double v : a.data()) total += v;
  return MakeResult({}, {total}, {a}, [a](detail::Node& self) {
    std::vector<double> g(a.size(), self.grad[0]);
    AccumulateGrad(a, g);
  });
}

Tensor Mean(const Tensor& a) {
  if (a.size() == 0) throw DimensionError("mean: empty tensor");
  return Scale(Sum(a), 1.0 / static_cast<double>(a.size()));
}

}  // namespace lat
