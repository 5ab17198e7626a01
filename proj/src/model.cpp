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

#include "lat/model.hpp"

#include <stdexcept>

#include "lat/ctc_loss.hpp"
#include "lat/transducer_loss.hpp"

namespace lat {

ModelConfig ModelConfig::FromConfig(const KeyValueConfig& cfg, std::size_t vocab_size) {
  ModelConfig m;
  EncoderConfig& e = m.encoder;
  e.vocab_size = vocab_size;
  e.feat_dim = cfg.GetSize("model.feat_dim", e.feat_dim);
  e.ae_dim = cfg.GetSize("model.ae_dim", e.ae_dim);
  e.ae_layers = cfg.GetSize("model.ae_layers", e.ae_layers);
  e.causal = cfg.GetBool("model.causal", e.causal);
  e.downsample = cfg.GetSize("model.downsample", e.downsample);
  e.le_embed_dim = cfg.GetSize("model.le_embed_dim", e.le_embed_dim);
  e.le_dim = cfg.GetSize("model.le_dim", e.le_dim);
  e.joint_dim = cfg.GetSize("model.joint_dim", e.joint_dim);
  e.Validate();

  LookaheadConfig& la = m.lookahead;
  la.enabled = cfg.GetBool("lookahead.enabled", la.enabled);
  la.w = cfg.GetSize("lookahead.w", la.w);
  la.embed_dim = cfg.GetSize("lookahead.embed_dim", la.embed_dim);
  la.hidden_dim = cfg.GetSize("lookahead.hidden_dim", la.hidden_dim);
  la.lambda_iam = cfg.GetDouble("lookahead.lambda_iam", la.lambda_iam);
  const std::string objective = cfg.GetString("lookahead.iam_objective", "transducer");
  if (objective == "transducer") {
    la.iam_objective = IamObjective::kTransducer;
  } else if (objective == "ctc") {
    la.iam_objective = IamObjective::kCtc;
  } else {
    throw ConfigError("lookahead.iam_objective must be transducer or ctc, got " + objective);
  }
  la.zero_init_output = cfg.GetBool("lookahead.zero_init_output", la.zero_init_output);
  if (cfg.Has("lookahead.max_horizon_frames")) {
    const std::string v = cfg.GetString("lookahead.max_horizon_frames", "");
    if (v != "unlimited" && v != "none") {
      la.max_horizon_frames = cfg.GetSize("lookahead.max_horizon_frames", 0);
    }
  }
  if (la.w == 0) throw ConfigError("lookahead.w must be >= 1");
  if (la.lambda_iam < 0.0) throw ConfigError("lookahead.lambda_iam must be >= 0");
  return m;
}

TransducerModel::TransducerModel(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  Rng rng = MakeRng(seed, "init");
  acoustic_ = AcousticEncoder(params_, cfg.encoder, rng);
  text_ = TextEncoder(params_, cfg.encoder, rng);
  joint_ = JointNetwork(params_, cfg.encoder, rng);
  if (cfg.lookahead.enabled) {
    // Separate stream: enabling lookahead leaves every other initial weight
    // unchanged.
    Rng la_rng = MakeRng(seed, "init.lookahead");
    conditioner_ = LookaheadConditioner(params_, cfg.lookahead, cfg.encoder.vocab_size,
                                        cfg.encoder.le_dim, la_rng);
  }
}

const LookaheadConditioner& TransducerModel::conditioner() const {
  if (!cfg_.lookahead.enabled) throw std::logic_error("lookahead is disabled for this model");
  return conditioner_;
}

LookaheadWindow TransducerModel::Windows(const Tensor& h) const {
  return ExtractWindows(IamGreedy(joint_, h), cfg_.lookahead.w, kBlankId,
                        cfg_.lookahead.max_horizon_frames);
}

ForwardPass RunForward(const TransducerModel& model, const Tensor& x, std::span<const int> y) {
  ForwardPass fp;
  fp.h = model.acoustic().Encode(x);
  fp.g = model.text().Encode(y);
  fp.iam_logits = model.joint().ImplicitAcousticLogits(fp.h);
  if (model.lookahead_enabled()) {
    // Windows are discrete inputs: no gradient flows through the argmax.
    fp.windows = ExtractWindows(IamGreedy(fp.iam_logits), model.config().lookahead.w, kBlankId,
                                model.config().lookahead.max_horizon_frames);
    fp.g_hat = model.conditioner().Condition(fp.g, fp.windows);
    fp.lattice = LookaheadLattice(model.joint(), fp.h, fp.g_hat);
  } else {
    fp.lattice = model.joint().Lattice(fp.h, fp.g);
  }
  return fp;
}

LossParts CombinedLoss(const TransducerModel& model, const Tensor& x, std::span<const int> y) {
  const ForwardPass fp = RunForward(model, x, y);
  LossParts parts;
  Tensor transducer = RnntLoss(fp.lattice, y);
  parts.transducer = transducer.item();
  const double lambda = model.config().lookahead.lambda_iam;
  const bool ctc = model.config().lookahead.iam_objective == IamObjective::kCtc;
  auto iam_loss = [&](const Tensor& logits) {
    return ctc ? CtcLoss(logits, y) : RnntLoss(RepeatOverPositions(logits, y.size() + 1), y);
  };
  if (lambda > 0.0) {
    Tensor iam = iam_loss(fp.iam_logits);
    parts.iam = iam.item();
    parts.total = Add(transducer, Scale(iam, lambda));
  } else {
    parts.iam = iam_loss(fp.iam_logits.Detach()).item();
    parts.total = transducer;
  }
  return parts;
}

}  // namespace lat
