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

#include "lat/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lat/checkpoint.hpp"
#include "lat/random.hpp"

#ifndef LAT_DEFAULT_DATA_DIR
#define LAT_DEFAULT_DATA_DIR "data"
#endif

namespace lat {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::ofstream OpenForWrite(const fs::path& path, bool append = false) {
  std::ofstream out(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string FormatNumber(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------- config

void TrainConfig::Validate() const {
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (!(base_lr > 0.0)) throw ConfigError("train.base_lr must be > 0");
  if (!(clip_norm >= 0.0)) throw ConfigError("train.clip_norm must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("train.beta1/beta2 must be in [0, 1)");
  }
  if (log_every < 1) throw ConfigError("train.log_every must be >= 1");
}

TrainConfig TrainConfig::FromConfig(const KeyValueConfig& cfg) {
  TrainConfig t;
  t.epochs = cfg.GetSize("train.epochs", t.epochs);
  t.base_lr = cfg.GetDouble("train.base_lr", t.base_lr);
  t.warmup_steps = cfg.GetSize("train.warmup_steps", t.warmup_steps);
  t.clip_norm = cfg.GetDouble("train.clip_norm", t.clip_norm);
  t.beta1 = cfg.GetDouble("train.beta1", t.beta1);
  t.beta2 = cfg.GetDouble("train.beta2", t.beta2);
  t.epsilon = cfg.GetDouble("train.epsilon", t.epsilon);
  t.log_every = cfg.GetSize("train.log_every", t.log_every);
  t.checkpoint_every = cfg.GetSize("train.checkpoint_every", t.checkpoint_every);
  t.max_utterances = cfg.GetSize("train.max_utterances", t.max_utterances);
  t.Validate();
  return t;
}

double TrainConfig::LearningRate(std::size_t step) const {
  if (warmup_steps == 0) return base_lr;
  const double s = static_cast<double>(std::max<std::size_t>(step, 1));
  const double w = static_cast<double>(warmup_steps);
  return base_lr * std::min(s / w, std::sqrt(w / s));
}

ModelConfig ModelConfigFor(const KeyValueConfig& cfg, const Vocabulary& vocab,
                           std::size_t feat_dim) {
  if (cfg.Has("model.feat_dim") && cfg.GetSize("model.feat_dim", 0) != feat_dim) {
    throw ConfigError("model.feat_dim does not match the corpus feature width " +
                      std::to_string(feat_dim));
  }
  KeyValueConfig copy = cfg;
  copy.Set("model.feat_dim", std::to_string(feat_dim));
  return ModelConfig::FromConfig(copy, vocab.size());
}

// ---------------------------------------------------------------- training

Trainer::Trainer(TransducerModel& model, TrainConfig cfg, std::uint64_t seed)
    : model_(model), cfg_(cfg), seed_(seed) {
  cfg_.Validate();
  for (const auto& [name, t] : model_.parameters().entries()) {
    state_.m.emplace_back(t.size(), 0.0);
    state_.v.emplace_back(t.size(), 0.0);
  }
}

StepLog Trainer::Step(const Utterance& utt, const Vocabulary& vocab) {
  const std::vector<int> labels = TokenIds(vocab, utt.words);
  auto& entries = model_.parameters().entries();
  model_.parameters().ZeroGrad();
  StepLog log;
  log.step = state_.step + 1;
  log.epoch = state_.epochs_done + 1;
  log.utt_id = utt.id;
  log.lambda_iam = model_.config().lookahead.lambda_iam;
  try {
    Tape tape;
    const LossParts parts = CombinedLoss(model_, utt.frames, labels);
    log.total = parts.total.item();
    log.transducer = parts.transducer;
    log.iam = parts.iam;
    if (!std::isfinite(log.total)) throw NumericError("loss is not finite");
    Backward(parts.total);
  } catch (const NumericError& e) {
    throw TrainingError("non-finite value at step " + std::to_string(log.step) + " (utterance " +
                        utt.id + "): " + e.what());
  }

  std::vector<std::vector<double>> grads;
  grads.reserve(entries.size());
  double norm2 = 0.0;
  for (const auto& [name, t] : entries) {
    grads.push_back(t.grad());
    for (double g : grads.back()) norm2 += g * g;
  }
  if (!std::isfinite(norm2)) {
    throw TrainingError("non-finite gradient at step " + std::to_string(log.step));
  }
  const double norm = std::sqrt(norm2);
  const double scale = cfg_.clip_norm > 0.0 && norm > cfg_.clip_norm ? cfg_.clip_norm / norm : 1.0;

  ++state_.step;
  log.lr = cfg_.LearningRate(state_.step);
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(state_.step));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(state_.step));
  for (std::size_t p = 0; p < entries.size(); ++p) {
    auto values = entries[p].second.mutable_data();
    auto& m = state_.m[p];
    auto& v = state_.v[p];
    const auto& g = grads[p];
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double gi = g[i] * scale;
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * gi;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * gi * gi;
      values[i] -= log.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.epsilon);
    }
  }
  return log;
}

std::vector<EpochLog> Trainer::Run(const std::vector<Utterance>& train, const Vocabulary& vocab,
                                   const std::function<void(const StepLog&)>& on_step,
                                   const std::function<void(const EpochLog&)>& on_epoch) {
  const std::size_t n = cfg_.max_utterances == 0 ? train.size()
                                                 : std::min(cfg_.max_utterances, train.size());
  if (n == 0) throw TrainingError("empty training split");
  std::vector<EpochLog> epochs;
  while (state_.epochs_done < cfg_.epochs) {
    const std::size_t epoch = state_.epochs_done + 1;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng = MakeRng(seed_, "shuffle", epoch);
    for (std::size_t i = n; i > 1; --i) {
      const auto j = static_cast<std::size_t>(UniformInt(rng, 0, static_cast<int>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }
    EpochLog e;
    e.epoch = epoch;
    for (std::size_t idx : order) {
      const StepLog s = Step(train[idx], vocab);
      e.total += s.total;
      e.transducer += s.transducer;
      e.iam += s.iam;
      ++e.steps;
      if (on_step) on_step(s);
    }
    e.total /= static_cast<double>(e.steps);
    e.transducer /= static_cast<double>(e.steps);
    e.iam /= static_cast<double>(e.steps);
    state_.epochs_done = epoch;
    epochs.push_back(e);
    if (on_epoch) on_epoch(e);
  }
  return epochs;
}

void Trainer::SaveCheckpoint(const fs::path& path) const {
  NamedTensors out;
  const auto& entries = model_.parameters().entries();
  for (const auto& e : entries) out.emplace_back(e.first, e.second);
  for (std::size_t p = 0; p < entries.size(); ++p) {
    out.emplace_back("adam.m." + entries[p].first, Tensor({state_.m[p].size()}, state_.m[p]));
    out.emplace_back("adam.v." + entries[p].first, Tensor({state_.v[p].size()}, state_.v[p]));
  }
  out.emplace_back("state.step", Tensor::Scalar(static_cast<double>(state_.step)));
  out.emplace_back("state.epochs_done", Tensor::Scalar(static_cast<double>(state_.epochs_done)));
  WriteCheckpoint(path, out);
}

void Trainer::LoadCheckpoint(const fs::path& path) {
  const NamedTensors in = ReadCheckpoint(path);
  model_.parameters().Assign(in);
  auto find = [&](const std::string& name) -> const Tensor& {
    for (const auto& e : in) {
      if (e.first == name) return e.second;
    }
    throw CheckpointError(path.string() + ": missing " + name);
  };
  const auto& entries = model_.parameters().entries();
  for (std::size_t p = 0; p < entries.size(); ++p) {
    const Tensor& m = find("adam.m." + entries[p].first);
    const Tensor& v = find("adam.v." + entries[p].first);
    state_.m[p].assign(m.data().begin(), m.data().end());
    state_.v[p].assign(v.data().begin(), v.data().end());
  }
  state_.step = static_cast<std::size_t>(find("state.step").item());
  state_.epochs_done = static_cast<std::size_t>(find("state.epochs_done").item());
}

// ---------------------------------------------------------------- decoding

std::vector<DecodedUtterance> DecodeUtterances(const TransducerModel& model,
                                               const std::vector<Utterance>& utts,
                                               const Vocabulary& vocab, const DecodeConfig& cfg) {
  std::vector<DecodedUtterance> out;
  out.reserve(utts.size());
  for (const auto& u : utts) {
    const DecodeOutput d = Decode(model, u.frames, cfg);
    DecodedUtterance r;
    r.utt_id = u.id;
    const Hypothesis& best = d.hypotheses.at(0);
    for (int id : best.tokens) r.tokens.push_back(vocab.token(id));
    r.words = TokensToWords(r.tokens);
    r.log_prob = best.log_prob;
    r.horizon = d.horizon;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------- scoring

ScoringTables LoadScoringTables(const KeyValueConfig& cfg, const fs::path& data_dir) {
  ScoringTables t;
  t.lexicon = Lexicon::Load(data_dir / "lexicon.tsv");
  t.train_counts = ReadWordCounts(data_dir / "train_counts.tsv");
  t.features = FeatureTable::Load(
      cfg.GetString("metrics.features", std::string(LAT_DEFAULT_DATA_DIR) + "/features.tsv"));
  t.clusters = ClusterMap::Load(
      cfg.GetString("metrics.clusters", std::string(LAT_DEFAULT_DATA_DIR) + "/clusters.tsv"));
  t.metrics.rare_threshold = cfg.GetSize("metrics.rare_threshold", t.metrics.rare_threshold);
  return t;
}

std::vector<ScoreRow> ScoreSplit(const std::string& split, const std::vector<Sequence>& refs,
                                 const std::vector<Sequence>& hyps, const ScoringTables& tables) {
  std::vector<ScoreRow> rows;
  const Rate wer = Wer(refs, hyps);
  rows.push_back({"wer", split, wer.value, static_cast<double>(wer.count)});
  const Rate rare = RareWer(refs, hyps, tables.train_counts, tables.metrics);
  rows.push_back({"rare_wer", split, rare.value, static_cast<double>(rare.count)});

  double per = 0.0, wfed = 0.0, der = 0.0;
  std::size_t ref_phones = 0, unknown = 0, hyp_words = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const Sequence r = UtterancePhones(refs[i], tables.lexicon);
    const Sequence h = UtterancePhones(hyps[i], tables.lexicon, &unknown);
    hyp_words += hyps[i].size();
    ref_phones += r.size();
    per += PhoneDistance(r, h);
    wfed += Wfed(r, h, tables.features);
    der += Der(r, h, tables.clusters);
  }
  const double denom = ref_phones == 0 ? 1.0 : static_cast<double>(ref_phones);
  const double n_phones = static_cast<double>(ref_phones);
  rows.push_back({"per", split, per / denom, n_phones});
  rows.push_back({"per_total", split, per, n_phones});
  rows.push_back({"wfed", split, wfed / denom, n_phones});
  rows.push_back({"wfed_total", split, wfed, n_phones});
  rows.push_back({"der", split, der / denom, n_phones});
  rows.push_back({"der_total", split, der, n_phones});
  const Rate halluc = HallucinationScore(refs, hyps, tables.lexicon, tables.clusters);
  rows.push_back({"hallucination", split, halluc.value, static_cast<double>(halluc.count)});
  rows.push_back({"g2p_unknown_words", split, static_cast<double>(unknown),
                  static_cast<double>(hyp_words)});
  return rows;
}

std::string ScoreCsv(const std::vector<ScoreRow>& rows) {
  std::string out = "metric,split,value,count\n";
  for (const auto& r : rows) {
    out += r.metric + "," + r.split + "," + FormatNumber(r.value) + "," + FormatNumber(r.count) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------- commands

void CmdGenData(const CommandContext& ctx) {
  const SynthSpec spec = SynthSpec::FromConfig(ctx.config, ctx.seed);
  const SynthCorpus corpus = GenerateCorpus(spec, ctx.config.GetSize("data.n_train", 2000),
                                            ctx.config.GetSize("data.n_test_in", 200),
                                            ctx.config.GetSize("data.n_test_rare", 200));
  WriteCorpus(corpus, ctx.out_dir);
}

std::string RunRecordJson(const RunRecord& record) {
  json j;
  j["seed"] = record.seed;
  j["config"] = record.config;
  j["wall_clock_seconds"] = record.wall_clock_seconds;
  j["epochs"] = json::array();
  for (const auto& e : record.epochs) {
    j["epochs"].push_back({{"epoch", e.epoch},
                           {"steps", e.steps},
                           {"total", e.total},
                           {"transducer", e.transducer},
                           {"iam", e.iam}});
  }
  j["final_metrics"] = json::object();
  for (const auto& [split, metrics] : record.final_metrics) {
    for (const auto& [name, value] : metrics) j["final_metrics"][split][name] = value;
  }
  return j.dump(2) + "\n";
}

namespace {

std::vector<Utterance> RequireSplit(const fs::path& data_dir, const std::string& split) {
  if (!fs::exists(data_dir / split / "text.tsv")) {
    throw std::runtime_error("missing corpus: no " + split + " split under " + data_dir.string());
  }
  return ReadSplit(data_dir, split);
}

struct LoadedCorpus {
  Vocabulary vocab;
  std::size_t feat_dim = 0;
};

LoadedCorpus CorpusInfo(const fs::path& data_dir, const std::vector<Utterance>& any_split) {
  LoadedCorpus c;
  c.vocab = Vocabulary::Load(data_dir / "vocab.txt");
  if (!any_split.empty()) {
    c.feat_dim = any_split.front().frames.dim(1);
  } else {
    const auto train = RequireSplit(data_dir, "train");
    if (train.empty()) throw std::runtime_error("empty train split in " + data_dir.string());
    c.feat_dim = train.front().frames.dim(1);
  }
  return c;
}

std::vector<Sequence> Refs(const std::vector<Utterance>& utts) {
  std::vector<Sequence> refs;
  for (const auto& u : utts) refs.push_back(u.words);
  return refs;
}

}  // namespace

RunRecord CmdTrain(const CommandContext& ctx, const fs::path& data_dir,
                   const std::optional<fs::path>& resume) {
  const auto started = std::chrono::steady_clock::now();
  const std::vector<Utterance> train = RequireSplit(data_dir, "train");
  const LoadedCorpus corpus = CorpusInfo(data_dir, train);
  const ModelConfig mcfg = ModelConfigFor(ctx.config, corpus.vocab, corpus.feat_dim);
  const TrainConfig tcfg = TrainConfig::FromConfig(ctx.config);
  TransducerModel model(mcfg, ctx.seed);
  Trainer trainer(model, tcfg, ctx.seed);
  if (resume) trainer.LoadCheckpoint(*resume);

  fs::create_directories(ctx.out_dir);
  {
    std::ofstream snap = OpenForWrite(ctx.out_dir / "config.snapshot");
    snap << ctx.config.ToString();
  }
  std::ofstream log = OpenForWrite(ctx.out_dir / "train_log.jsonl", resume.has_value());
  RunRecord record;
  record.config = ctx.config.ToString();
  record.seed = ctx.seed;

  auto on_step = [&](const StepLog& s) {
    if (s.step % tcfg.log_every != 0 && s.step != 1) return;
    log << json{{"step", s.step},       {"epoch", s.epoch},           {"utt_id", s.utt_id},
                {"total", s.total},     {"transducer", s.transducer}, {"iam", s.iam},
                {"lambda_iam", s.lambda_iam}, {"lr", s.lr}}
               .dump()
        << '\n';
  };
  auto on_epoch = [&](const EpochLog& e) {
    log << json{{"epoch_end", e.epoch}, {"steps", e.steps}, {"total", e.total},
                {"transducer", e.transducer}, {"iam", e.iam}}
               .dump()
        << '\n';
    log.flush();
    if (tcfg.checkpoint_every > 0 && e.epoch % tcfg.checkpoint_every == 0) {
      trainer.SaveCheckpoint(ctx.out_dir / ("epoch_" + std::to_string(e.epoch) + ".ckpt"));
    }
  };
  record.epochs = trainer.Run(train, corpus.vocab, on_step, on_epoch);
  trainer.SaveCheckpoint(ctx.out_dir / "model.ckpt");

  const auto eval_splits = SplitList(ctx.config.GetString("train.eval_splits", "test_in,test_rare"));
  if (!eval_splits.empty()) {
    const ScoringTables tables = LoadScoringTables(ctx.config, data_dir);
    DecodeConfig dcfg = DecodeConfig::FromConfig(ctx.config);
    dcfg.mode = DecodeConfig::Mode::kGreedy;
    for (const auto& split : eval_splits) {
      const auto utts = RequireSplit(data_dir, split);
      std::vector<Sequence> hyps;
      for (const auto& d : DecodeUtterances(model, utts, corpus.vocab, dcfg)) hyps.push_back(d.words);
      for (const auto& row : ScoreSplit(split, Refs(utts), hyps, tables)) {
        record.final_metrics[split][row.metric] = row.value;
      }
    }
  }
  record.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::ofstream run = OpenForWrite(ctx.out_dir / "run.json");
  run << RunRecordJson(record);
  return record;
}

void CmdDecode(const CommandContext& ctx, const fs::path& data_dir, const fs::path& checkpoint,
               const std::string& split, const fs::path& hyps_out) {
  const std::vector<Utterance> utts = RequireSplit(data_dir, split);
  const LoadedCorpus corpus = CorpusInfo(data_dir, utts);
  TransducerModel model(ModelConfigFor(ctx.config, corpus.vocab, corpus.feat_dim), ctx.seed);
  model.parameters().Assign(ReadCheckpoint(checkpoint));
  const DecodeConfig dcfg = DecodeConfig::FromConfig(ctx.config);
  if (hyps_out.has_parent_path()) fs::create_directories(hyps_out.parent_path());
  std::ofstream out = OpenForWrite(hyps_out);
  for (const auto& d : DecodeUtterances(model, utts, corpus.vocab, dcfg)) {
    out << json{{"utt_id", d.utt_id},
                {"tokens", d.tokens},
                {"words", d.words},
                {"log_prob", d.log_prob},
                {"horizon_stats",
                 {{"mean", d.horizon.mean},
                  {"max", d.horizon.max},
                  {"padded_rows", d.horizon.padded_rows}}}}
               .dump()
        << '\n';
  }
}

std::vector<Sequence> ReadHypothesisWords(const fs::path& path, const std::vector<Utterance>& refs) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open hypotheses " + path.string());
  std::map<std::string, Sequence> by_id;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    by_id[j.at("utt_id").get<std::string>()] = j.at("words").get<Sequence>();
  }
  std::vector<Sequence> hyps;
  for (const auto& r : refs) {
    const auto it = by_id.find(r.id);
    if (it == by_id.end()) throw std::runtime_error("no hypothesis for utterance " + r.id);
    hyps.push_back(it->second);
  }
  return hyps;
}

std::vector<ScoreRow> CmdScore(const CommandContext& ctx, const fs::path& data_dir,
                               const fs::path& hyps, const std::string& split,
                               const fs::path& csv_out) {
  const std::vector<Utterance> utts = RequireSplit(data_dir, split);
  const ScoringTables tables = LoadScoringTables(ctx.config, data_dir);
  const auto rows = ScoreSplit(split, Refs(utts), ReadHypothesisWords(hyps, utts), tables);
  if (csv_out.has_parent_path()) fs::create_directories(csv_out.parent_path());
  std::ofstream out = OpenForWrite(csv_out);
  out << ScoreCsv(rows);
  return rows;
}

std::vector<AblationRow> CmdAblateW(const CommandContext& ctx, const fs::path& data_dir,
                                    const std::vector<std::size_t>& w_list) {
  if (w_list.empty()) throw ConfigError("ablate-w: empty w list");
  const std::vector<std::string> splits{"test_in", "test_rare"};
  std::vector<AblationRow> rows;
  for (std::size_t w : w_list) {
    CommandContext run = ctx;
    run.config.Set("lookahead.enabled", "true");
    run.config.Set("lookahead.w", std::to_string(w));
    run.config.Set("train.eval_splits", "");
    run.out_dir = ctx.out_dir / ("w" + std::to_string(w));
    CmdTrain(run, data_dir);
    AblationRow row;
    row.w = w;
    for (const auto& split : splits) {
      const fs::path hyps = run.out_dir / ("hyps_" + split + ".jsonl");
      CmdDecode(run, data_dir, run.out_dir / "model.ckpt", split, hyps);
      for (const auto& r : CmdScore(run, data_dir, hyps, split,
                                    run.out_dir / ("score_" + split + ".csv"))) {
        if (r.metric == "wer") row.wer[split] = r.value;
      }
    }
    rows.push_back(row);
  }
  std::ofstream out = OpenForWrite(ctx.out_dir / "ablate_w.csv");
  out << "w";
  for (const auto& s : splits) out << "," << s;
  out << "\n";
  for (const auto& r : rows) {
    out << r.w;
    for (const auto& s : splits) out << "," << FormatNumber(r.wer.at(s));
    out << "\n";
  }
  return rows;
}

}  // namespace lat
