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

// Word and phone error metrics built on a single weighted edit distance:
// WER, rare-word WER, PER, weighted feature edit distance (WFED) and the
// Dolgopolsky sound-class error (DER).

#ifndef LAT_METRICS_HPP_
#define LAT_METRICS_HPP_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace lat {

using Sequence = std::vector<std::string>;

struct CostModel {
  std::function<double(const std::string&, const std::string&)> substitute;
  std::function<double(const std::string&)> insert;
  std::function<double(const std::string&)> remove;

  static CostModel Unit();
};

enum class EditOp { kMatch, kSubstitute, kInsert, kDelete };

struct AlignedPair {
  EditOp op;
  int ref_index;  // -1 for insertions
  int hyp_index;  // -1 for deletions
};

struct EditResult {
  double cost = 0.0;
  std::vector<AlignedPair> alignment;  // in sequence order

  std::size_t Count(EditOp op) const;
};

// Minimum-cost alignment. Among equal-cost alignments the backtrace prefers a
// diagonal step (match/substitution), then deletion, then insertion.
EditResult EditDistance(const Sequence& ref, const Sequence& hyp, const CostModel& costs);

struct Rate {
  double value = 0.0;
  double errors = 0.0;
  std::size_t count = 0;  // denominator
  bool degenerate = false;  // count was zero; value reported as 0
};

Rate Wer(const std::vector<Sequence>& refs, const std::vector<Sequence>& hyps);

struct MetricsConfig {
  std::size_t rare_threshold = 20;  // rare: train count < threshold
};

using WordCounts = std::unordered_map<std::string, std::size_t>;

// Errors at rare reference positions divided by the number of rare reference
// words. Substitutions and deletions belong to their reference word; an
// insertion belongs to the reference word before it (the first one when it
// precedes every reference word).
Rate RareWer(const std::vector<Sequence>& refs, const std::vector<Sequence>& hyps,
             const WordCounts& train_counts, const MetricsConfig& cfg);

// Unit-cost phone edit distance.
double PhoneDistance(const Sequence& ref, const Sequence& hyp);

// Articulatory features in {-1, 0, +1} per phone plus per-feature weights.
class FeatureTable {
 public:
  FeatureTable() = default;
  FeatureTable(std::vector<std::string> feature_names, std::vector<double> weights,
               std::map<std::string, std::vector<int>> phones);
  // Header row of feature names, weight row, then one row per phone; columns
  // are tab or space separated, first column is the phone (ignored on the
  // header and weight rows).
  static FeatureTable Load(const std::filesystem::path& path);

  bool Contains(const std::string& phone) const { return phones_.count(phone) > 0; }
  // sum_f weight_f * |a_f - b_f| / 2
  double SubstitutionCost(const std::string& a, const std::string& b) const;
  const std::vector<std::string>& features() const { return names_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<std::string> Phones() const;
  double TotalWeight() const;

 private:
  std::vector<std::string> names_;
  std::vector<double> weights_;
  std::map<std::string, std::vector<int>> phones_;
};

// Insertions and deletions cost `indel_cost`; by default the sum of the
// feature weights, i.e. a whole segment's worth of features.
double Wfed(const Sequence& ref, const Sequence& hyp, const FeatureTable& table,
            std::optional<double> indel_cost = std::nullopt);

class ClusterMap {
 public:
  ClusterMap() = default;
  explicit ClusterMap(std::map<std::string, std::string> clusters);
  // Lines of `phone<TAB>cluster_id`.
  static ClusterMap Load(const std::filesystem::path& path);

  const std::string& Cluster(const std::string& phone) const;
  bool Contains(const std::string& phone) const { return clusters_.count(phone) > 0; }

 private:
  std::map<std::string, std::string> clusters_;
};

double Der(const Sequence& ref, const Sequence& hyp, const ClusterMap& clusters);

// Word -> phone lookup with a per-character fallback for unknown words.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::map<std::string, Sequence> entries) : entries_(std::move(entries)) {}
  // Lines of `word<TAB>space-separated phones`.
  static Lexicon Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  bool Contains(const std::string& word) const { return entries_.count(word) > 0; }
  const std::map<std::string, Sequence>& entries() const { return entries_; }

 private:
  std::map<std::string, Sequence> entries_;
};

struct G2pResult {
  std::vector<Sequence> phones;  // one sequence per word
  std::size_t unknown_words = 0;
};

G2pResult G2p(const Sequence& words, const Lexicon& lexicon);
// Concatenated phones of a whole utterance.
Sequence UtterancePhones(const Sequence& words, const Lexicon& lexicon,
                         std::size_t* unknown_words = nullptr);

// Substitutions whose ref/hyp words differ by normalized DER >= 0.5 (DER
// distance over the reference word's phone count), per reference word.
Rate HallucinationScore(const std::vector<Sequence>& refs, const std::vector<Sequence>& hyps,
                        const Lexicon& lexicon, const ClusterMap& clusters);

}  // namespace lat

#endif  // LAT_METRICS_HPP_
