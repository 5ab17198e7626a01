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

#include "lat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lat {

namespace {

std::vector<std::string> SplitFields(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string field;
  while (in >> field) out.push_back(field);
  return out;
}

std::ifstream OpenOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

bool SkipLine(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

void CheckCost(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("edit costs must be finite and non-negative");
  }
}

}  // namespace

CostModel CostModel::Unit() {
  return CostModel{
      [](const std::string& a, const std::string& b) { return a == b ? 0.0 : 1.0; },
      [](const std::string&) { return 1.0; },
      [](const std::string&) { return 1.0; },
  };
}

std::size_t EditResult::Count(EditOp op) const {
  return static_cast<std::size_t>(std::count_if(
      alignment.begin(), alignment.end(), [op](const AlignedPair& p) { return p.op == op; }));
}

EditResult EditDistance(const Sequence& ref, const Sequence& hyp, const CostModel& costs) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<double> d((n + 1) * (m + 1), 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 1; i <= n; ++i) {
    const double c = costs.remove(ref[i - 1]);
    CheckCost(c);
    at(i, 0) = at(i - 1, 0) + c;
  }
  for (std::size_t j = 1; j <= m; ++j) {
    const double c = costs.insert(hyp[j - 1]);
    CheckCost(c);
    at(0, j) = at(0, j - 1) + c;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const double sub = ref[i - 1] == hyp[j - 1] ? 0.0 : costs.substitute(ref[i - 1], hyp[j - 1]);
      CheckCost(sub);
      at(i, j) = std::min({at(i - 1, j - 1) + sub, at(i - 1, j) + costs.remove(ref[i - 1]),
                           at(i, j - 1) + costs.insert(hyp[j - 1])});
    }
  }

  EditResult result;
  result.cost = at(n, m);
  // Backtrace from the end; ties go to the diagonal, then deletion. Walking
  // backwards this way puts non-diagonal steps as far left as possible.
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      const double sub = same ? 0.0 : costs.substitute(ref[i - 1], hyp[j - 1]);
      if (at(i, j) == at(i - 1, j - 1) + sub) {
        result.alignment.push_back({same ? EditOp::kMatch : EditOp::kSubstitute,
                                    static_cast<int>(i - 1), static_cast<int>(j - 1)});
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + costs.remove(ref[i - 1])) {
      result.alignment.push_back({EditOp::kDelete, static_cast<int>(i - 1), -1});
      --i;
      continue;
    }
    result.alignment.push_back({EditOp::kInsert, -1, static_cast<int>(j - 1)});
    --j;
  }
  std::reverse(result.alignment.begin(), result.alignment.end());
  return result;
}

namespace {

void CheckCorpus(const std::vector<Sequence>& refs, const std::vector<Sequence>& hyps) {
  if (refs.size() != hyps.size()) {
    throw std::invalid_argument("reference and hypothesis counts differ");
  }
}

Rate MakeRate(double errors, std::size_t count) {
  Rate r;
  r.errors = errors;
  r.count = count;
  r.degenerate = count == 0;
  r.value = count == 0 ? 0.0 : errors / static_cast<double>(count);
  return r;
}

}  // namespace

Rate Wer(const std::vector<Sequence>& refs, const std::vector<Sequence>& hyps) {
  CheckCorpus(refs, hyps);
  const CostModel unit = CostModel::Unit();
  double errors = 0.0;
  std::size_t words = 0;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    errors += EditDistance(refs[k], hyps[k], unit).cost;
    words += refs[k].size();
  }
  return MakeRate(errors, words);
}

Rate RareWer(const std::vector<Sequence>& refs, const std::vector<Sequence>& hyps,
             const WordCounts& train_counts, const MetricsConfig& cfg) {
  CheckCorpus(refs, hyps);
  if (cfg.rare_threshold < 1) throw std::invalid_argument("rare_threshold must be >= 1");
  auto rare = [&](const std::string& w) {
    const auto it = train_counts.find(w);
    return (it == train_counts.end() ? 0 : it->second) < cfg.rare_threshold;
  };
  const CostModel unit = CostModel::Unit();
  double errors = 0.0;
  std::size_t rare_words = 0;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    const Sequence& ref = refs[k];
    std::vector<bool> is_rare(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      is_rare[i] = rare(ref[i]);
      if (is_rare[i]) ++rare_words;
    }
    if (ref.empty()) continue;
    int last_ref = -1;
    for (const AlignedPair& p : EditDistance(ref, hyps[k], unit).alignment) {
      if (p.ref_index >= 0) last_ref = p.ref_index;
      switch (p.op) {
        case EditOp::kMatch:
          break;
        case EditOp::kSubstitute:
        case EditOp::kDelete:
          if (is_rare[p.ref_index]) errors += 1.0;
          break;
        case EditOp::kInsert:
          if (is_rare[last_ref < 0 ? 0 : last_ref]) errors += 1.0;
          break;
      }
    }
  }
  return MakeRate(errors, rare_words);
}

double PhoneDistance(const Sequence& ref, const Sequence& hyp) {
  return EditDistance(ref, hyp, CostModel::Unit()).cost;
}

FeatureTable::FeatureTable(std::vector<std::string> feature_names, std::vector<double> weights,
                           std::map<std::string, std::vector<int>> phones)
    : names_(std::move(feature_names)), weights_(std::move(weights)), phones_(std::move(phones)) {
  if (names_.size() != weights_.size()) {
    throw std::invalid_argument("feature table: weight count differs from feature count");
  }
  for (double w : weights_) {
    if (!(w >= 0.0)) throw std::invalid_argument("feature table: negative weight");
  }
  for (const auto& [phone, values] : phones_) {
    if (values.size() != names_.size()) {
      throw std::invalid_argument("feature table: wrong vector length for " + phone);
    }
    for (int v : values) {
      if (v < -1 || v > 1) throw std::invalid_argument("feature table: value outside {-1,0,1}");
    }
  }
}

FeatureTable FeatureTable::Load(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!SkipLine(line)) rows.push_back(SplitFields(line));
  }
  if (rows.size() < 2) throw std::runtime_error(path.string() + ": missing header or weights");
  std::vector<std::string> names(rows[0].begin() + 1, rows[0].end());
  std::vector<double> weights;
  for (std::size_t c = 1; c < rows[1].size(); ++c) weights.push_back(std::stod(rows[1][c]));
  std::map<std::string, std::vector<int>> phones;
  for (std::size_t r = 2; r < rows.size(); ++r) {
    std::vector<int> values;
    for (std::size_t c = 1; c < rows[r].size(); ++c) {
      const std::string& f = rows[r][c];
      values.push_back(f == "+" ? 1 : f == "-" ? -1 : f == "0" ? 0 : std::stoi(f));
    }
    if (!phones.emplace(rows[r][0], std::move(values)).second) {
      throw std::runtime_error(path.string() + ": duplicate phone " + rows[r][0]);
    }
  }
  return FeatureTable(std::move(names), std::move(weights), std::move(phones));
}

double FeatureTable::SubstitutionCost(const std::string& a, const std::string& b) const {
  const auto ia = phones_.find(a), ib = phones_.find(b);
  if (ia == phones_.end()) throw std::out_of_range("phone not in feature table: " + a);
  if (ib == phones_.end()) throw std::out_of_range("phone not in feature table: " + b);
  double cost = 0.0;
  for (std::size_t f = 0; f < weights_.size(); ++f) {
    cost += weights_[f] * std::abs(ia->second[f] - ib->second[f]) / 2.0;
  }
  return cost;
}

std::vector<std::string> FeatureTable::Phones() const {
  std::vector<std::string> out;
  for (const auto& entry : phones_) out.push_back(entry.first);
  return out;
}

double FeatureTable::TotalWeight() const {
  double total = 0.0;
  for (double w : weights_) total += w;
  return total;
}

double Wfed(const Sequence& ref, const Sequence& hyp, const FeatureTable& table,
            std::optional<double> indel) {
  const double indel_cost = indel.value_or(table.TotalWeight());
  for (const Sequence* seq : {&ref, &hyp}) {
    for (const std::string& p : *seq) {
      if (!table.Contains(p)) throw std::out_of_range("phone not in feature table: " + p);
    }
  }
  CostModel costs{
      [&](const std::string& a, const std::string& b) { return table.SubstitutionCost(a, b); },
      [indel_cost](const std::string&) { return indel_cost; },
      [indel_cost](const std::string&) { return indel_cost; },
  };
  return EditDistance(ref, hyp, costs).cost;
}

ClusterMap::ClusterMap(std::map<std::string, std::string> clusters)
    : clusters_(std::move(clusters)) {}

ClusterMap ClusterMap::Load(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  std::map<std::string, std::string> clusters;
  std::string line;
  while (std::getline(in, line)) {
    if (SkipLine(line)) continue;
    const auto fields = SplitFields(line);
    if (fields.size() != 2) throw std::runtime_error(path.string() + ": bad line: " + line);
    clusters[fields[0]] = fields[1];
  }
  return ClusterMap(std::move(clusters));
}

const std::string& ClusterMap::Cluster(const std::string& phone) const {
  const auto it = clusters_.find(phone);
  if (it == clusters_.end()) throw std::out_of_range("phone has no cluster: " + phone);
  return it->second;
}

double Der(const Sequence& ref, const Sequence& hyp, const ClusterMap& clusters) {
  auto map = [&](const Sequence& s) {
    Sequence out;
    out.reserve(s.size());
    for (const std::string& p : s) out.push_back(clusters.Cluster(p));
    return out;
  };
  return PhoneDistance(map(ref), map(hyp));
}

Lexicon Lexicon::Load(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  std::map<std::string, Sequence> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (SkipLine(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw std::runtime_error(path.string() + ": bad line: " + line);
    entries[line.substr(0, tab)] = SplitFields(line.substr(tab + 1));
  }
  return Lexicon(std::move(entries));
}

void Lexicon::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& [word, phones] : entries_) {
    out << word << '\t';
    for (std::size_t i = 0; i < phones.size(); ++i) out << (i ? " " : "") << phones[i];
    out << '\n';
  }
}

G2pResult G2p(const Sequence& words, const Lexicon& lexicon) {
  G2pResult result;
  for (const std::string& w : words) {
    const auto it = lexicon.entries().find(w);
    if (it != lexicon.entries().end()) {
      result.phones.push_back(it->second);
      continue;
    }
    ++result.unknown_words;
    Sequence spelled;
    for (char c : w) spelled.emplace_back(1, c);
    result.phones.push_back(std::move(spelled));
  }
  return result;
}

Sequence UtterancePhones(const Sequence& words, const Lexicon& lexicon,
                         std::size_t* unknown_words) {
  const G2pResult g = G2p(words, lexicon);
  if (unknown_words) *unknown_words += g.unknown_words;
  Sequence out;
  for (const Sequence& p : g.phones) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Rate HallucinationScore(const std::vector<Sequence>& refs, const std::vector<Sequence>& hyps,
                        const Lexicon& lexicon, const ClusterMap& clusters) {
  CheckCorpus(refs, hyps);
  const CostModel unit = CostModel::Unit();
  double count = 0.0;
  std::size_t words = 0;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    words += refs[k].size();
    for (const AlignedPair& p : EditDistance(refs[k], hyps[k], unit).alignment) {
      if (p.op != EditOp::kSubstitute) continue;
      const G2pResult g = G2p({refs[k][p.ref_index], hyps[k][p.hyp_index]}, lexicon);
      const double norm = std::max<std::size_t>(g.phones[0].size(), 1);
      if (Der(g.phones[0], g.phones[1], clusters) / norm >= 0.5) count += 1.0;
    }
  }
  return MakeRate(count, words);
}

}  // namespace lat
