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

// Synthetic speech-like corpus where a skewed word bigram model competes with
// clean acoustic evidence.
//
// Words are strings of single-character phones and a word is spelled by its
// phones, so transcripts double as phone sequences. Model tokens are the
// phones plus the word separator `|`, which also has its own (silence)
// acoustic feature. Each frame is a one-hot vector of the phone it realizes
// plus Gaussian noise; with probability rho the frame realizes the phone's
// confusable partner instead.

#ifndef LAT_TASKGEN_HPP_
#define LAT_TASKGEN_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lat/config.hpp"
#include "lat/metrics.hpp"
#include "lat/nn.hpp"
#include "lat/tensor.hpp"

namespace lat {

// Phone symbols in inventory order; phones 2k and 2k+1 are confusable.
inline constexpr char kPhoneInventory[] = "pbtdkgmnaoiuszlreEIOfvwjh";
inline constexpr char kWordSeparator[] = "|";

class TaskgenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SynthSpec {
  std::size_t n_phones = 12;
  std::size_t n_common_words = 24;
  std::size_t n_rare_words = 12;
  std::size_t min_word_len = 2;
  std::size_t max_word_len = 4;
  double kappa = 4.0;  // bigram skew: P(rank r) proportional to kappa^-r
  std::size_t min_frames_per_phone = 2;
  std::size_t max_frames_per_phone = 3;
  std::size_t separator_frames = 1;
  double sigma = 0.3;  // feature noise
  double rho = 0.2;    // confusion rate
  std::size_t min_sentence_words = 3;
  std::size_t max_sentence_words = 5;
  // Each rare word appears between 1 and this many times in train.
  std::size_t rare_train_max = 5;
  std::size_t rare_threshold = 20;
  std::uint64_t seed = 1;

  void Validate() const;
  // Reads `data.*` keys; the seed comes from the caller.
  static SynthSpec FromConfig(const KeyValueConfig& cfg, std::uint64_t seed);
  std::size_t feature_dim() const { return n_phones + 1; }
};

struct SynthUtterance {
  std::string id;
  Tensor frames;                   // T x feature_dim
  std::vector<std::string> words;
  std::vector<std::string> phones; // without separators
};

// Word bigram model over the common words. Context 0 is the sentence start;
// context i + 1 is common word i.
struct BigramLm {
  std::vector<std::vector<double>> probs;  // contexts x common words
};

struct SynthCorpus {
  std::vector<std::string> common_words;
  std::vector<std::string> rare_words;
  std::map<std::string, std::string> rare_sibling;  // rare word -> common word
  BigramLm lm;
  Lexicon lexicon;
  Vocabulary vocab;
  WordCounts train_counts;
  std::map<std::string, std::vector<SynthUtterance>> splits;  // train, test_in, test_rare
};

SynthCorpus GenerateCorpus(const SynthSpec& spec, std::size_t n_train, std::size_t n_test_in,
                           std::size_t n_test_rare);

// Writes `train/`, `test_in/`, `test_rare/` (feats.bin, text.tsv, phones.tsv)
// plus lexicon.tsv, vocab.txt and train_counts.tsv.
void WriteCorpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

struct Utterance {
  std::string id;
  Tensor frames;
  std::vector<std::string> words;
};

// Reads one split written by WriteCorpus.
std::vector<Utterance> ReadSplit(const std::filesystem::path& dir, const std::string& split);
WordCounts ReadWordCounts(const std::filesystem::path& path);

// feats.bin: magic, u32 version, u32 count, then per utterance u32 frames,
// u32 dims and frames*dims little-endian float64 values.
void WriteFeatures(const std::filesystem::path& path, const std::vector<Tensor>& frames);
std::vector<Tensor> ReadFeatures(const std::filesystem::path& path);

// Words <-> model tokens (phones with `|` between words).
std::vector<std::string> WordsToTokens(const std::vector<std::string>& words);
std::vector<std::string> TokensToWords(const std::vector<std::string>& tokens);
std::vector<int> TokenIds(const Vocabulary& vocab, const std::vector<std::string>& words);
std::vector<std::string> IdsToWords(const Vocabulary& vocab, const std::vector<int>& ids);

}  // namespace lat

#endif  // LAT_TASKGEN_HPP_
