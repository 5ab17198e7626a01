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


// Command-line entry point: gen-data, train, decode, score, ablate-w.

#include <cstdio>
#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "lat/harness.hpp"

namespace {

struct Common {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
};

void AddCommon(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "key = value config file");
  app->add_option("--seed", c.seed, "root seed");
  app->add_option("--out-dir", c.out_dir, "output directory");
  app->add_option("--set", c.overrides, "override a config key, key=value")->take_all();
}

lat::CommandContext Context(const Common& c) {
  lat::CommandContext ctx;
  if (!c.config_path.empty()) ctx.config = lat::KeyValueConfig::Load(c.config_path);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw lat::ConfigError("--set expects key=value, got " + kv);
    ctx.config.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  ctx.seed = c.seed;
  ctx.out_dir = c.out_dir;
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lookahead transducer toolkit"};
  app.require_subcommand(1);
  Common common;
  std::string data_dir = "corpus";
  std::string resume, checkpoint, split = "test_rare", hyps, csv;
  std::vector<std::size_t> w_list{2, 3, 5};

  auto* gen = app.add_subcommand("gen-data", "generate the synthetic corpus into --out-dir");
  AddCommon(gen, common);

  auto* train = app.add_subcommand("train", "train a model on --data");
  AddCommon(train, common);
  train->add_option("--data", data_dir, "corpus directory")->required();
  train->add_option("--resume", resume, "checkpoint to continue from");

  auto* decode = app.add_subcommand("decode", "decode one split to a JSON-lines file");
  AddCommon(decode, common);
  decode->add_option("--data", data_dir, "corpus directory")->required();
  decode->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  decode->add_option("--split", split, "split name");
  decode->add_option("--hyps", hyps, "output file (default <out-dir>/hyps_<split>.jsonl)");

  auto* score = app.add_subcommand("score", "score a hypotheses file");
  AddCommon(score, common);
  score->add_option("--data", data_dir, "corpus directory")->required();
  score->add_option("--hyps", hyps, "hypotheses file")->required();
  score->add_option("--split", split, "split name");
  score->add_option("--csv", csv, "output file (default <out-dir>/score_<split>.csv)");

  auto* ablate = app.add_subcommand("ablate-w", "train and score one model per window size");
  AddCommon(ablate, common);
  ablate->add_option("--data", data_dir, "corpus directory")->required();
  ablate->add_option("--w-list", w_list, "window sizes")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    const lat::CommandContext ctx = Context(common);
    if (gen->parsed()) {
      lat::CmdGenData(ctx);
    } else if (train->parsed()) {
      std::optional<std::filesystem::path> from;
      if (!resume.empty()) from = resume;
      const lat::RunRecord r = lat::CmdTrain(ctx, data_dir, from);
      for (const auto& [s, metrics] : r.final_metrics) {
        std::printf("%s wer=%.4f rare_wer=%.4f hallucination=%.4f\n", s.c_str(),
                    metrics.at("wer"), metrics.at("rare_wer"), metrics.at("hallucination"));
      }
    } else if (decode->parsed()) {
      if (hyps.empty()) hyps = (ctx.out_dir / ("hyps_" + split + ".jsonl")).string();
      lat::CmdDecode(ctx, data_dir, checkpoint, split, hyps);
    } else if (score->parsed()) {
      if (csv.empty()) csv = (ctx.out_dir / ("score_" + split + ".csv")).string();
      std::cout << lat::ScoreCsv(lat::CmdScore(ctx, data_dir, hyps, split, csv));
    } else if (ablate->parsed()) {
      for (const auto& row : lat::CmdAblateW(ctx, data_dir, w_list)) {
        std::printf("w=%zu test_in=%.4f test_rare=%.4f\n", row.w, row.wer.at("test_in"),
                    row.wer.at("test_rare"));
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
