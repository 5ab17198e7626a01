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

#include "lat/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace lat {

// ---------------------------------------------------------------- Vocabulary

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_[0] != kBlankToken) {
    throw std::invalid_argument(std::string("vocabulary: first token must be ") +
                                kBlankToken);
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw std::invalid_argument("vocabulary: empty token");
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
      throw std::invalid_argument("vocabulary: duplicate token '" + tokens_[i] + "'");
    }
  }
}

Vocabulary Vocabulary::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    tokens.push_back(line);
  }
  return Vocabulary(std::move(tokens));
}

void Vocabulary::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write vocabulary " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

int Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) throw std::out_of_range("unknown token '" + token + "'");
  return it->second;
}

// ---------------------------------------------------------------- Parameters

Tensor& Parameters::Add(const std::string& name, Tensor value) {
  if (Contains(name)) throw std::invalid_argument("duplicate parameter " + name);
  value.set_requires_grad(true);
  entries_.emplace_back(name, std::move(value));
  return entries_.back().second;
}

Tensor& Parameters::Get(const std::string& name) {
  for (auto& [n, t] : entries_) {
    if (n == name) return t;
  }
  throw std::out_of_range("no parameter named " + name);
}

const Tensor& Parameters::Get(const std::string& name) const {
  return const_cast<Parameters*>(this)->Get(name);
}

bool Parameters::Contains(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.first == name; });
}

std::size_t Parameters::Count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.second.size();
  return n;
}

void Parameters::ZeroGrad() {
  for (auto& e : entries_) e.second.ZeroGrad();
}

void Parameters::Assign(const NamedTensors& source) {
  for (auto& [name, tensor] : entries_) {
    auto it = std::find_if(source.begin(), source.end(),
                           [&](const auto& e) { return e.first == name; });
    if (it == source.end()) throw std::runtime_error("missing parameter " + name);
    if (it->second.shape() != tensor.shape()) {
      throw DimensionError("parameter " + name + " has shape " +
                           ShapeToString(it->second.shape()) + ", expected " +
                           ShapeToString(tensor.shape()));
    }
    std::copy(it->second.data().begin(), it->second.data().end(),
              tensor.mutable_data().begin());
  }
}

Tensor UniformInit(Shape shape, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
  std::vector<double> values(NumElements(shape));
  for (double& v : values) v = Uniform(rng, -bound, bound);
  return Tensor(std::move(shape), std::move(values));
}

Tensor AddBias(const Tensor& x, const Tensor& bias) { return BroadcastAdd(x, bias); }

// ---------------------------------------------------------------- Lstm

Lstm::Lstm(Parameters& params, const std::string& prefix, std::size_t input_dim,
           std::size_t hidden_dim, Rng& rng)
    : hidden_dim_(hidden_dim) {
  w_in_ = params.Add(prefix + ".w_in", UniformInit({input_dim, 4 * hidden_dim}, hidden_dim, rng));
  w_rec_ = params.Add(prefix + ".w_rec", UniformInit({hidden_dim, 4 * hidden_dim}, hidden_dim, rng));
  std::vector<double> b(4 * hidden_dim, 0.0);
  std::fill(b.begin() + hidden_dim, b.begin() + 2 * hidden_dim, 1.0);  // forget gate
  bias_ = params.Add(prefix + ".bias", Tensor({1, 4 * hidden_dim}, std::move(b)));
}

LstmState Lstm::ZeroState() const {
  return {Tensor::Zeros({1, hidden_dim_}), Tensor::Zeros({1, hidden_dim_})};
}

Tensor Lstm::InputProjection(const Tensor& x) const {
  return AddBias(MatMul(x, w_in_), bias_);
}

LstmState Lstm::Step(const Tensor& projected_row, const LstmState& state) const {
  const std::size_t d = hidden_dim_;
  Tensor gates = Add(projected_row, MatMul(state.h, w_rec_));
  Tensor in_gate = Sigmoid(Slice(gates, 1, 0, d));
  Tensor forget_gate = Sigmoid(Slice(gates, 1, d, 2 * d));
  Tensor cell_in = Tanh(Slice(gates, 1, 2 * d, 3 * d));
  Tensor out_gate = Sigmoid(Slice(gates, 1, 3 * d, 4 * d));
  Tensor c = Add(Mul(forget_gate, state.c), Mul(in_gate, cell_in));
  Tensor h = Mul(out_gate, Tanh(c));
  return {h, c};
}

Tensor Lstm::Run(const Tensor& x) const {
  const Tensor projected = InputProjection(x);
  LstmState state = ZeroState();
  std::vector<Tensor> rows;
  rows.reserve(x.dim(0));
  for (std::size_t t = 0; t < x.dim(0); ++t) {
    state = Step(Slice(projected, 0, t, t + 1), state);
    rows.push_back(state.h);
  }
  return ConcatRows(rows);
}

// ---------------------------------------------------------------- encoders

void EncoderConfig::Validate() const {
  if (feat_dim == 0 || ae_dim == 0 || le_dim == 0 || joint_dim == 0 || le_embed_dim == 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  if (vocab_size < 2) throw std::invalid_argument("vocabulary needs blank plus one token");
  if (ae_layers < 1 || ae_layers > 2) throw std::invalid_argument("ae_layers must be 1 or 2");
  if (downsample != 1 && downsample != 2) {
    throw std::invalid_argument("downsample must be 1 or 2");
  }
}

namespace {

Tensor ReverseRows(const Tensor& x) {
  std::vector<Tensor> rows;
  for (std::size_t t = x.dim(0); t-- > 0;) rows.push_back(Slice(x, 0, t, t + 1));
  return ConcatRows(rows);
}

Tensor EveryOtherRow(const Tensor& x) {
  std::vector<Tensor> rows;
  for (std::size_t t = 0; t < x.dim(0); t += 2) rows.push_back(Slice(x, 0, t, t + 1));
  return ConcatRows(rows);
}

}  // namespace

AcousticEncoder::AcousticEncoder(Parameters& params, const EncoderConfig& cfg, Rng& rng)
    : cfg_(cfg) {
  cfg.Validate();
  std::size_t in = cfg.feat_dim;
  for (std::size_t l = 0; l < cfg.ae_layers; ++l) {
    const std::string prefix = "ae.l" + std::to_string(l);
    forward_.emplace_back(params, prefix + ".fwd", in, cfg.ae_dim, rng);
    if (!cfg.causal) backward_.emplace_back(params, prefix + ".bwd", in, cfg.ae_dim, rng);
    in = cfg.acoustic_output_dim();
  }
  output_dim_ = cfg.acoustic_output_dim();
}

Tensor AcousticEncoder::Encode(const Tensor& x) const {
  if (x.rank() != 2 || x.dim(1) != cfg_.feat_dim) {
    throw DimensionError("acoustic_encode: expected T x " + std::to_string(cfg_.feat_dim) +
                         " features, got " + ShapeToString(x.shape()));
  }
  if (x.dim(0) == 0) throw DimensionError("acoustic_encode: no frames");
  Tensor layer_in = x;
  for (std::size_t l = 0; l < forward_.size(); ++l) {
    Tensor out = forward_[l].Run(layer_in);
    if (!cfg_.causal) {
      std::vector<Tensor> both{out, ReverseRows(backward_[l].Run(ReverseRows(layer_in)))};
      out = Concat(both);
    }
    // Stride-2 downsampling keeps even rows after the first layer.
    if (l == 0 && cfg_.downsample == 2) out = EveryOtherRow(out);
    layer_in = out;
  }
  return layer_in;
}

TextEncoder::TextEncoder(Parameters& params, const EncoderConfig& cfg, Rng& rng)
    : vocab_size_(cfg.vocab_size) {
  cfg.Validate();
  embedding_ = params.Add("le.embedding", UniformInit({cfg.vocab_size, cfg.le_embed_dim}, 1, rng));
  lstm_ = Lstm(params, "le.lstm", cfg.le_embed_dim, cfg.le_dim, rng);
}

TextState TextEncoder::Start() const { return Step({lstm_.ZeroState(), Tensor()}, kBlankId); }

TextState TextEncoder::Step(const TextState& state, int token) const {
  const int ids[1] = {token};
  Tensor projected = lstm_.InputProjection(Embedding(embedding_, ids));
  LstmState next = lstm_.Step(projected, state.lstm);
  return {next, next.h};
}

Tensor TextEncoder::Encode(std::span<const int> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size() + 1);
  ids.push_back(kBlankId);
  for (int t : tokens) {
    if (t == kBlankId) throw std::invalid_argument("text_encode: blank id in transcript");
    if (t < 0 || static_cast<std::size_t>(t) >= vocab_size_) {
      throw std::invalid_argument("text_encode: token id " + std::to_string(t) +
                                  " outside vocabulary");
    }
    ids.push_back(t);
  }
  const Tensor projected = lstm_.InputProjection(Embedding(embedding_, ids));
  LstmState state = lstm_.ZeroState();
  std::vector<Tensor> rows;
  rows.reserve(ids.size());
  for (std::size_t u = 0; u < ids.size(); ++u) {
    state = lstm_.Step(Slice(projected, 0, u, u + 1), state);
    rows.push_back(state.h);
  }
  return ConcatRows(rows);
}

// ---------------------------------------------------------------- joint

JointNetwork::JointNetwork(Parameters& params, const EncoderConfig& cfg, Rng& rng)
    : acoustic_dim_(cfg.acoustic_output_dim()),
      text_dim_(cfg.le_dim),
      joint_dim_(cfg.joint_dim),
      vocab_size_(cfg.vocab_size) {
  ae_proj_ = params.Add("joint.ae_proj", UniformInit({acoustic_dim_, joint_dim_}, acoustic_dim_, rng));
  ae_bias_ = params.Add("joint.ae_bias", Tensor::Zeros({1, joint_dim_}));
  le_proj_ = params.Add("joint.le_proj", UniformInit({text_dim_, joint_dim_}, text_dim_, rng));
  le_bias_ = params.Add("joint.le_bias", Tensor::Zeros({1, joint_dim_}));
  out_proj_ = params.Add("joint.out_proj", UniformInit({joint_dim_, vocab_size_}, joint_dim_, rng));
  out_bias_ = params.Add("joint.out_bias", Tensor::Zeros({1, vocab_size_}));
}

Tensor JointNetwork::ProjectAcoustic(const Tensor& h) const {
  if (h.rank() != 2 || h.dim(1) != acoustic_dim_) {
    throw DimensionError("joint: acoustic input " + ShapeToString(h.shape()) +
                         " does not have width " + std::to_string(acoustic_dim_));
  }
  return AddBias(MatMul(h, ae_proj_), ae_bias_);
}

Tensor JointNetwork::ProjectText(const Tensor& g) const {
  if (g.rank() != 2 || g.dim(1) != text_dim_) {
    throw DimensionError("joint: text input " + ShapeToString(g.shape()) +
                         " does not have width " + std::to_string(text_dim_));
  }
  return AddBias(MatMul(g, le_proj_), le_bias_);
}

Tensor JointNetwork::Output(const Tensor& summed) const {
  return AddBias(MatMul(Tanh(summed), out_proj_), out_bias_);
}

Tensor JointNetwork::Logits(const Tensor& h_row, const Tensor& g_row) const {
  return Output(Add(ProjectAcoustic(h_row), ProjectText(g_row)));
}

Tensor JointNetwork::Lattice(const Tensor& h, const Tensor& g) const {
  const std::size_t frames = h.dim(0), positions = g.dim(0);
  Tensor a = Reshape(ProjectAcoustic(h), {frames, 1, joint_dim_});
  Tensor b = Reshape(ProjectText(g), {1, positions, joint_dim_});
  Tensor summed = Reshape(BroadcastAdd(a, b), {frames * positions, joint_dim_});
  return Reshape(Output(summed), {frames, positions, vocab_size_});
}

Tensor JointNetwork::ConditionedLattice(const Tensor& h, const Tensor& g_hat) const {
  if (g_hat.rank() != 3 || g_hat.dim(0) != h.dim(0) || g_hat.dim(2) != text_dim_) {
    throw DimensionError("joint: conditioned text encoding " + ShapeToString(g_hat.shape()) +
                         " does not match " + std::to_string(h.dim(0)) + " frames");
  }
  const std::size_t frames = h.dim(0), positions = g_hat.dim(1);
  Tensor a = Reshape(ProjectAcoustic(h), {frames, 1, joint_dim_});
  Tensor b = Reshape(ProjectText(Reshape(g_hat, {frames * positions, text_dim_})),
                     {frames, positions, joint_dim_});
  Tensor summed = Reshape(BroadcastAdd(a, b), {frames * positions, joint_dim_});
  return Reshape(Output(summed), {frames, positions, vocab_size_});
}

Tensor JointNetwork::ImplicitAcousticLogits(const Tensor& h) const {
  Tensor zero_text = ProjectText(Tensor::Zeros({1, text_dim_}));
  return Output(BroadcastAdd(ProjectAcoustic(h), zero_text));
}

}  // namespace lat
