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
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "lat/checkpoint.hpp"
#include "lat/harness.hpp"

using namespace lat;
namespace fs = std::filesystem;

namespace {

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lat_test_harness" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

KeyValueConfig SmallConfig() {
  KeyValueConfig cfg;
  cfg.Set("data.n_train", "10");
  cfg.Set("data.n_test_in", "4");
  cfg.Set("data.n_test_rare", "0");
  cfg.Set("data.n_phones", "6");
  cfg.Set("data.n_common_words", "5");
  cfg.Set("data.n_rare_words", "0");
  cfg.Set("data.min_sentence_words", "1");
  cfg.Set("data.max_sentence_words", "2");
  cfg.Set("model.ae_dim", "8");
  cfg.Set("model.le_embed_dim", "4");
  cfg.Set("model.le_dim", "8");
  cfg.Set("model.joint_dim", "8");
  cfg.Set("lookahead.enabled", "true");
  cfg.Set("lookahead.w", "2");
  cfg.Set("lookahead.embed_dim", "4");
  cfg.Set("lookahead.hidden_dim", "8");
  cfg.Set("lookahead.lambda_iam", "0.5");
  cfg.Set("train.epochs", "1");
  cfg.Set("train.base_lr", "0.01");
  cfg.Set("train.warmup_steps", "0");
  cfg.Set("train.log_every", "1");
  cfg.Set("train.eval_splits", "test_in");
  cfg.Set("decode.mode", "greedy");
  return cfg;
}

fs::path MakeCorpus(const KeyValueConfig& cfg, std::uint64_t seed, const std::string& name) {
  CommandContext ctx{cfg, seed, Scratch(name)};
  CmdGenData(ctx);
  return ctx.out_dir;
}

double MeanLoss(TransducerModel& model, const std::vector<Utterance>& utts, const Vocabulary& vocab) {
  double total = 0.0;
  for (const auto& u : utts) total += CombinedLoss(model, u.frames, TokenIds(vocab, u.words)).total.item();
  return total / static_cast<double>(utts.size());
}

}  // namespace

TEST_CASE("train config parsing and schedule") {
  KeyValueConfig kv;
  kv.Set("train.epochs", "0");
  CHECK_THROWS_AS(TrainConfig::FromConfig(kv), ConfigError);

  TrainConfig cfg;
  cfg.base_lr = 1.0;
  cfg.warmup_steps = 100;
  CHECK(cfg.LearningRate(50) == doctest::Approx(0.5));
  CHECK(cfg.LearningRate(100) == doctest::Approx(1.0));
  CHECK(cfg.LearningRate(400) == doctest::Approx(0.5));
  cfg.warmup_steps = 0;
  CHECK(cfg.LearningRate(1) == 1.0);
  CHECK(cfg.LearningRate(1000) == 1.0);
}

TEST_CASE("one epoch on ten utterances lowers the loss on most seeds") {
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const KeyValueConfig cfg = SmallConfig();
    const fs::path data = MakeCorpus(cfg, seed, "decrease");
    const auto train = ReadSplit(data, "train");
    REQUIRE(train.size() == 10);
    const Vocabulary vocab = Vocabulary::Load(data / "vocab.txt");
    TransducerModel model(ModelConfigFor(cfg, vocab, train[0].frames.dim(1)), seed);
    const double before = MeanLoss(model, train, vocab);
    Trainer trainer(model, TrainConfig::FromConfig(cfg), seed);
    trainer.Run(train, vocab);
    const double after = MeanLoss(model, train, vocab);
    if (after < before) ++improved;
  }
  CHECK(improved >= 8);
}

TEST_CASE("disabled and zero-initialized lookahead give the same first step") {
  KeyValueConfig cfg = SmallConfig();
  const fs::path data = MakeCorpus(cfg, 3, "first_step");
  const auto train = ReadSplit(data, "train");
  const Vocabulary vocab = Vocabulary::Load(data / "vocab.txt");
  const std::size_t feat = train[0].frames.dim(1);

  TransducerModel with(ModelConfigFor(cfg, vocab, feat), 3);
  cfg.Set("lookahead.enabled", "false");
  TransducerModel without(ModelConfigFor(cfg, vocab, feat), 3);
  Trainer a(with, TrainConfig::FromConfig(cfg), 3);
  Trainer b(without, TrainConfig::FromConfig(cfg), 3);
  const StepLog la = a.Step(train[0], vocab);
  const StepLog base = b.Step(train[0], vocab);
  CHECK(la.total == base.total);
  CHECK(la.transducer == base.transducer);
  CHECK(la.iam == base.iam);
}

TEST_CASE("resumed training matches an uninterrupted run bit for bit") {
  KeyValueConfig cfg = SmallConfig();
  cfg.Set("train.epochs", "3");
  cfg.Set("train.warmup_steps", "5");
  cfg.Set("train.eval_splits", "");
  const fs::path data = MakeCorpus(cfg, 5, "resume_data");

  CommandContext full{cfg, 5, Scratch("resume_full")};
  CmdTrain(full, data);

  KeyValueConfig first = cfg;
  first.Set("train.epochs", "1");
  CommandContext part{first, 5, Scratch("resume_part")};
  CmdTrain(part, data);
  CommandContext rest{cfg, 5, Scratch("resume_rest")};
  CmdTrain(rest, data, part.out_dir / "model.ckpt");

  CHECK(Slurp(full.out_dir / "model.ckpt") == Slurp(rest.out_dir / "model.ckpt"));
  // The resumed log continues where the first part stopped.
  const std::string head = Slurp(part.out_dir / "train_log.jsonl");
  const std::string tail = Slurp(rest.out_dir / "train_log.jsonl");
  CHECK(Slurp(full.out_dir / "train_log.jsonl") == head + tail);
}

TEST_CASE("logged loss parts add up to the total") {
  const KeyValueConfig cfg = SmallConfig();
  const fs::path data = MakeCorpus(cfg, 7, "sum_data");
  CommandContext ctx{cfg, 7, Scratch("sum_run")};
  const RunRecord record = CmdTrain(ctx, data);
  CHECK(record.final_metrics.count("test_in") == 1);

  std::ifstream log(ctx.out_dir / "train_log.jsonl");
  std::string line;
  std::size_t steps = 0;
  while (std::getline(log, line)) {
    const auto j = nlohmann::json::parse(line);
    if (!j.contains("step")) continue;
    ++steps;
    const double total = j["total"], transducer = j["transducer"], iam = j["iam"];
    const double lambda = j["lambda_iam"];
    CHECK(lambda == 0.5);
    CHECK(std::abs(total - (transducer + lambda * iam)) <= 1e-9);
  }
  CHECK(steps == 10);
  const auto run = nlohmann::json::parse(Slurp(ctx.out_dir / "run.json"));
  CHECK(run["seed"] == 7);
  CHECK(run["epochs"].size() == 1);
  CHECK(run["config"].get<std::string>() == cfg.ToString());
}

TEST_CASE("training errors are reported") {
  const KeyValueConfig cfg = SmallConfig();
  CommandContext ctx{cfg, 1, Scratch("missing_run")};
  CHECK_THROWS_WITH_AS(CmdTrain(ctx, Scratch("missing_data")), doctest::Contains("missing corpus"),
                       std::runtime_error);

  const fs::path data = MakeCorpus(cfg, 2, "nan_data");
  const auto train = ReadSplit(data, "train");
  const Vocabulary vocab = Vocabulary::Load(data / "vocab.txt");
  TransducerModel model(ModelConfigFor(cfg, vocab, train[0].frames.dim(1)), 2);
  Trainer trainer(model, TrainConfig::FromConfig(cfg), 2);
  trainer.Step(train[0], vocab);
  model.parameters().Get("joint.out_bias").mutable_data()[0] = std::nan("");
  CHECK_THROWS_WITH_AS(trainer.Step(train[1], vocab), doctest::Contains("step 2"), TrainingError);

  KeyValueConfig wrong = cfg;
  wrong.Set("model.feat_dim", "99");
  CHECK_THROWS_AS(ModelConfigFor(wrong, vocab, 7), ConfigError);
}

TEST_CASE("decode and score write readable reports") {
  const KeyValueConfig cfg = SmallConfig();
  const fs::path data = MakeCorpus(cfg, 4, "score_data");
  CommandContext ctx{cfg, 4, Scratch("score_run")};
  CmdTrain(ctx, data);
  CmdDecode(ctx, data, ctx.out_dir / "model.ckpt", "test_in", ctx.out_dir / "hyps.jsonl");
  const auto refs = ReadSplit(data, "test_in");
  const auto hyps = ReadHypothesisWords(ctx.out_dir / "hyps.jsonl", refs);
  CHECK(hyps.size() == refs.size());
  const auto rows = CmdScore(ctx, data, ctx.out_dir / "hyps.jsonl", "test_in", ctx.out_dir / "s.csv");
  std::set<std::string> metrics;
  for (const auto& r : rows) metrics.insert(r.metric);
  for (const char* m : {"wer", "rare_wer", "per", "wfed", "der", "hallucination"}) {
    CHECK(metrics.count(m) == 1);
  }
  const std::string csv = Slurp(ctx.out_dir / "s.csv");
  CHECK(csv.rfind("metric,split,value,count\n", 0) == 0);
  CHECK(csv == ScoreCsv(rows));

  // Same hypotheses scored directly against references with perfect output.
  std::vector<Sequence> ref_words;
  for (const auto& r : refs) ref_words.push_back(r.words);
  const auto perfect = ScoreSplit("test_in", ref_words, ref_words, LoadScoringTables(cfg, data));
  for (const auto& r : perfect) {
    if (r.metric == "wer" || r.metric == "per" || r.metric == "hallucination") CHECK(r.value == 0.0);
  }
}

TEST_CASE("window ablation varies only the window size") {
  KeyValueConfig cfg = SmallConfig();
  cfg.Set("lookahead.enabled", "false");
  const fs::path data = MakeCorpus(cfg, 6, "ablate_data");
  CommandContext ctx{cfg, 6, Scratch("ablate_run")};
  const auto rows = CmdAblateW(ctx, data, {2, 3});
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) CHECK(r.wer.size() == 2);

  std::istringstream table(Slurp(ctx.out_dir / "ablate_w.csv"));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(table, line)) lines.push_back(line);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "w,test_in,test_rare");
  CHECK(lines[1].rfind("2,", 0) == 0);
  CHECK(lines[2].rfind("3,", 0) == 0);

  // Config snapshots differ in exactly one line.
  auto snapshot = [&](const std::string& w) {
    std::istringstream in(Slurp(ctx.out_dir / w / "config.snapshot"));
    std::vector<std::string> out;
    while (std::getline(in, line)) out.push_back(line);
    return out;
  };
  const auto a = snapshot("w2"), b = snapshot("w3");
  REQUIRE(a.size() == b.size());
  std::vector<std::string> diff;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) diff.push_back(a[i] + " | " + b[i]);
  }
  REQUIRE(diff.size() == 1);
  CHECK(diff[0] == "lookahead.w = 2 | lookahead.w = 3");

  // A single-entry list is one train + score run.
  CommandContext single{cfg, 6, Scratch("ablate_single")};
  const auto one = CmdAblateW(single, data, {3});
  KeyValueConfig direct_cfg = cfg;
  direct_cfg.Set("lookahead.enabled", "true");
  direct_cfg.Set("lookahead.w", "3");
  direct_cfg.Set("train.eval_splits", "test_in,test_rare");
  CommandContext direct{direct_cfg, 6, Scratch("ablate_direct")};
  const RunRecord r = CmdTrain(direct, data);
  CHECK(one.at(0).wer.at("test_in") == r.final_metrics.at("test_in").at("wer"));
  CHECK(Slurp(single.out_dir / "w3" / "model.ckpt") == Slurp(direct.out_dir / "model.ckpt"));
}

TEST_CASE("pipeline reports are byte-identical across runs") {
  const KeyValueConfig cfg = SmallConfig();
  std::vector<std::string> csvs;
  for (int run = 0; run < 2; ++run) {
    const std::string tag = "pipeline" + std::to_string(run);
    const fs::path data = MakeCorpus(cfg, 9, tag + "_data");
    CommandContext ctx{cfg, 9, Scratch(tag)};
    CmdTrain(ctx, data);
    CmdDecode(ctx, data, ctx.out_dir / "model.ckpt", "test_in", ctx.out_dir / "hyps.jsonl");
    CmdScore(ctx, data, ctx.out_dir / "hyps.jsonl", "test_in", ctx.out_dir / "score.csv");
    csvs.push_back(Slurp(ctx.out_dir / "hyps.jsonl") + Slurp(ctx.out_dir / "score.csv") +
                   Slurp(ctx.out_dir / "model.ckpt"));
  }
  CHECK(csvs[0] == csvs[1]);
}
