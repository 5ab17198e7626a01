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

#ifndef LAT_TENSOR_HPP_
#define LAT_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lat {

using Shape = std::vector<std::size_t>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an operation produces NaN or Inf.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for misuse of the tape: non-scalar loss, loss not recorded, ...
class GraphError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

std::string ShapeToString(const Shape& shape);
std::size_t NumElements(const Shape& shape);

class Tape;

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until something flows into it
  bool requires_grad = false;
  bool leaf = true;
  // Propagates this node's grad into its inputs. Inputs are kept alive by the
  // closure's captures.
  std::function<void(Node&)> backward;
  const Tape* tape = nullptr;

  std::span<double> GradBuffer();
};

}  // namespace detail

// Dense row-major float64 array. Copies share storage; use Clone() for a deep
// copy.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Full(Shape shape, double value, bool requires_grad = false);
  static Tensor Scalar(double value);
  static Tensor Matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor Vector(std::vector<double> values);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const;

  std::span<const double> data() const;
  // Direct write access for parameter updates and test rigging. Does not
  // interact with the tape.
  std::span<double> mutable_data();
  double item() const;
  double operator[](std::size_t flat_index) const { return data()[flat_index]; }

  bool requires_grad() const;
  void set_requires_grad(bool value);
  // Zeros if nothing has been accumulated yet.
  std::vector<double> grad() const;
  bool has_grad() const;
  void ZeroGrad();

  Tensor Clone() const;
  // Same values, fresh leaf with no history.
  Tensor Detach() const;

  const detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }

 private:
  friend Tensor MakeResult(Shape, std::vector<double>, std::span<const Tensor>,
                           std::function<void(detail::Node&)>);
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

  std::shared_ptr<detail::Node> node_;
};

// Ordered record of the operations executed while it is active. Constructing
// a Tape makes it the active tape of the current thread; destruction restores
// the previous one. Ops whose inputs require grad are recorded only while a
// tape is active, so inference runs without one.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  std::size_t size() const { return nodes_.size(); }
  void Clear() { nodes_.clear(); }

  static Tape* Active();

 private:
  friend Tensor MakeResult(Shape, std::vector<double>, std::span<const Tensor>,
                           std::function<void(detail::Node&)>);
  friend void Backward(const Tensor& loss);

  std::vector<std::shared_ptr<detail::Node>> nodes_;
  Tape* previous_ = nullptr;
};

// Builds the output of a primitive. When any input requires grad and a tape
// is active, the node is recorded with `backward`, which must add the node's
// grad into the inputs it captured. Throws NumericError on non-finite values.
Tensor MakeResult(Shape shape, std::vector<double> value,
                  std::span<const Tensor> inputs,
                  std::function<void(detail::Node&)> backward);
inline Tensor MakeResult(Shape shape, std::vector<double> value,
                         std::initializer_list<Tensor> inputs,
                         std::function<void(detail::Node&)> backward) {
  return MakeResult(std::move(shape), std::move(value),
                    std::span<const Tensor>(inputs.begin(), inputs.size()),
                    std::move(backward));
}

// Adds `values` into the grad buffer of `t` (no-op when t does not require
// grad).
void AccumulateGrad(const Tensor& t, std::span<const double> values);

// Reverse pass from a scalar loss. Gradients are summed into every leaf that
// requires grad; the active tape is consumed.
void Backward(const Tensor& loss);

// Primitives. Every op checks shapes and throws DimensionError on mismatch.
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& a, double factor);
// Equal-rank broadcasting: each axis must match or be 1 on one side.
Tensor BroadcastAdd(const Tensor& a, const Tensor& b);
Tensor MatMul(const Tensor& a, const Tensor& b);
Tensor Tanh(const Tensor& a);
Tensor Sigmoid(const Tensor& a);
Tensor LogSoftmax(const Tensor& a);
// Concatenates along the last axis; leading axes must agree.
Tensor Concat(std::span<const Tensor> parts);
// Concatenates along axis 0; trailing axes must agree.
Tensor ConcatRows(std::span<const Tensor> parts);
// Half-open range [begin, end) along `axis`.
Tensor Slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end);
Tensor Reshape(const Tensor& a, Shape shape);
// Rows of `table` (V x E) selected by `ids`, result is ids.size() x E.
Tensor Embedding(const Tensor& table, std::span<const int> ids);
Tensor Sum(const Tensor& a);
Tensor Mean(const Tensor& a);

}  // namespace lat

#endif  // LAT_TENSOR_HPP_
