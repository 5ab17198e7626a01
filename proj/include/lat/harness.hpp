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

// Training, decoding, scoring and the window-size ablation behind the CLI.

#ifndef LAT_HARNESS_HPP_
#define LAT_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lat/config.hpp"
#include "lat/decode.hpp"
#include "lat/metrics.hpp"
#include "lat/model.hpp"
#include "lat/taskgen.hpp"

namespace lat {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  std::size_t epochs = 4;
  double base_lr = 3e-3;
  // lr(step) = base_lr * min(step / warmup, sqrt(warmup / step)); constant
  // when warmup is 0.
  std::size_t warmup_steps = 400;
  double clip_norm = 5.0;  // global gradient norm; 0 disables clipping
  double beta1 = 0.9;
  double beta2 = 0.98;
  double epsilon = 1e-9;
  std::size_t log_every = 10;
  std::size_t checkpoint_every = 0;  // epochs; 0 = final checkpoint only
  std::size_t max_utterances = 0;    // 0 = whole train split

  void Validate() const;
  static TrainConfig FromConfig(const KeyValueConfig& cfg);
  double LearningRate(std::size_t step) const;
};

struct StepLog {
  std::size_t step = 0;
  std::size_t epoch = 0;
  std::string utt_id;
  double total = 0.0;
  double transducer = 0.0;
  double iam = 0.0;
  double lambda_iam = 0.0;
  double lr = 0.0;
};

struct EpochLog {
  std::size_t epoch = 0;
  std::size_t steps = 0;
  double total = 0.0;  // means over the epoch
  double transducer = 0.0;
  double iam = 0.0;
};

// Adam moments keyed by parameter order.
struct OptimizerState {
  std::vector<std::vector<double>> m, v;
  std::size_t step = 0;
  std::size_t epochs_done = 0;
};

class Trainer {
 public:
  Trainer(TransducerModel& model, TrainConfig cfg, std::uint64_t seed);

  // One update on one utterance; returns the loss parts before the update.
  StepLog Step(const Utterance& utt, const Vocabulary& vocab);
  // Runs the remaining epochs. `on_step` sees every step; `on_epoch` runs
  // after each completed epoch.
  std::vector<EpochLog> Run(const std::vector<Utterance>& train, const Vocabulary& vocab,
                            const std::function<void(const StepLog&)>& on_step = {},
                            const std::function<void(const EpochLog&)>& on_epoch = {});

  void SaveCheckpoint(const std::filesystem::path& path) const;
  void LoadCheckpoint(const std::filesystem::path& path);

  const OptimizerState& state() const { return state_; }

 private:
  TransducerModel& model_;
  TrainConfig cfg_;
  std::uint64_t seed_;
  OptimizerState state_;
};

// Model configuration for a corpus: vocabulary size and feature width come
// from the data.
ModelConfig ModelConfigFor(const KeyValueConfig& cfg, const Vocabulary& vocab,
                           std::size_t feat_dim);

struct DecodedUtterance {
  std::string utt_id;
  std::vector<std::string> tokens;
  std::vector<std::string> words;
  double log_prob = 0.0;
  HorizonStats horizon;
};

std::vector<DecodedUtterance> DecodeUtterances(const TransducerModel& model,
                                               const std::vector<Utterance>& utts,
                                               const Vocabulary& vocab, const DecodeConfig& cfg);

struct ScoreRow {
  std::string metric;
  std::string split;
  double value = 0.0;
  double count = 0.0;
};

struct ScoringTables {
  Lexicon lexicon;
  FeatureTable features;
  ClusterMap clusters;
  WordCounts train_counts;
  MetricsConfig metrics;
};

// Corpus tables plus the feature/cluster files named by `metrics.features`
// and `metrics.clusters` (default: the bundled data directory).
ScoringTables LoadScoringTables(const KeyValueConfig& cfg, const std::filesystem::path& data_dir);

std::vector<ScoreRow> ScoreSplit(const std::string& split, const std::vector<Sequence>& refs,
                                 const std::vector<Sequence>& hyps, const ScoringTables& tables);

std::string ScoreCsv(const std::vector<ScoreRow>& rows);

// ---- CLI commands ---------------------------------------------------------

struct CommandContext {
  KeyValueConfig config;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;
};

// Corpus sizes from data.n_train / data.n_test_in / data.n_test_rare.
void CmdGenData(const CommandContext& ctx);

struct RunRecord {
  std::string config;  // snapshot, `key = value` lines
  std::uint64_t seed = 0;
  std::vector<EpochLog> epochs;
  std::map<std::string, std::map<std::string, double>> final_metrics;  // split -> metric
  double wall_clock_seconds = 0.0;
};

std::string RunRecordJson(const RunRecord& record);

// Trains on `data_dir`/train, writing model.ckpt, train_log.jsonl,
// config.snapshot and run.json into ctx.out_dir. With `resume`, training
// continues from that checkpoint's epoch.
RunRecord CmdTrain(const CommandContext& ctx, const std::filesystem::path& data_dir,
                   const std::optional<std::filesystem::path>& resume = std::nullopt);

// Writes JSON lines {utt_id, tokens, words, log_prob, horizon_stats}.
void CmdDecode(const CommandContext& ctx, const std::filesystem::path& data_dir,
               const std::filesystem::path& checkpoint, const std::string& split,
               const std::filesystem::path& hyps_out);

// CSV with columns metric,split,value,count.
std::vector<ScoreRow> CmdScore(const CommandContext& ctx, const std::filesystem::path& data_dir,
                               const std::filesystem::path& hyps, const std::string& split,
                               const std::filesystem::path& csv_out);

struct AblationRow {
  std::size_t w = 0;
  std::map<std::string, double> wer;  // split -> WER
};

// One lookahead model per w sharing corpus and seed; writes ablate_w.csv.
std::vector<AblationRow> CmdAblateW(const CommandContext& ctx, const std::filesystem::path& data_dir,
                                    const std::vector<std::size_t>& w_list);

std::vector<Sequence> ReadHypothesisWords(const std::filesystem::path& path,
                                          const std::vector<Utterance>& refs);

}  // namespace lat

#endif  // LAT_HARNESS_HPP_
