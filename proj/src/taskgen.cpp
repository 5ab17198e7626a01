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

#include "lat/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "lat/binary_io.hpp"
#include "lat/random.hpp"

namespace lat {

namespace {

constexpr char kFeatsMagic[8] = {'L', 'A', 'T', 'F', 'E', 'A', 'T', 'S'};
constexpr std::uint32_t kFeatsVersion = 1;

std::string PhoneSymbol(std::size_t i) { return std::string(1, kPhoneInventory[i]); }

template <typename T>
void Shuffle(std::vector<T>& v, Rng& rng) {
  // Fisher-Yates with our own integer draw so the order does not depend on
  // the standard library's distribution implementation.
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(UniformInt(rng, 0, static_cast<int>(i) - 1));
    std::swap(v[i - 1], v[j]);
  }
}

std::size_t SampleIndex(const std::vector<double>& probs, Rng& rng) {
  double u = UniformUnit(rng);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    u -= probs[i];
    if (u < 0.0) return i;
  }
  return probs.size() - 1;
}

std::size_t UniformIn(Rng& rng, std::size_t lo, std::size_t hi) {
  return static_cast<std::size_t>(UniformInt(rng, static_cast<int>(lo), static_cast<int>(hi)));
}

std::string Join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> SplitWords(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::vector<std::string> Spell(const std::string& word) {
  std::vector<std::string> phones;
  for (char c : word) phones.emplace_back(1, c);
  return phones;
}

class Generator {
 public:
  explicit Generator(const SynthSpec& spec) : spec_(spec) {}

  void MakeWords(SynthCorpus& c) {
    Rng rng = MakeRng(spec_.seed, "data.words");
    std::set<std::string> taken;
    while (c.common_words.size() < spec_.n_common_words) {
      const std::size_t len = UniformIn(rng, spec_.min_word_len, spec_.max_word_len);
      std::string w;
      for (std::size_t i = 0; i < len; ++i) w += kPhoneInventory[UniformIn(rng, 0, spec_.n_phones - 1)];
      if (taken.insert(w).second) c.common_words.push_back(w);
    }
    // A rare word shares everything but its last phone with a common word;
    // the replacement phone is neither the original nor its confusable
    // partner, so the two stay acoustically distinct.
    for (std::size_t i = 0; i < spec_.n_rare_words; ++i) {
      const std::string& sibling = c.common_words[i % c.common_words.size()];
      const std::size_t last = static_cast<std::size_t>(
          std::find(kPhoneInventory, kPhoneInventory + spec_.n_phones, sibling.back()) -
          kPhoneInventory);
      std::vector<std::size_t> options;
      for (std::size_t p = 0; p < spec_.n_phones; ++p) {
        if (p != last && p != Partner(last)) options.push_back(p);
      }
      Shuffle(options, rng);
      bool placed = false;
      for (std::size_t p : options) {
        std::string w = sibling;
        w.back() = kPhoneInventory[p];
        if (taken.insert(w).second) {
          c.rare_words.push_back(w);
          c.rare_sibling[w] = sibling;
          placed = true;
          break;
        }
      }
      if (!placed) throw TaskgenError("cannot derive a distinct rare word from " + sibling);
    }
  }

  void MakeLm(SynthCorpus& c) {
    Rng rng = MakeRng(spec_.seed, "data.lm");
    const std::size_t n = c.common_words.size();
    c.lm.probs.assign(n + 1, std::vector<double>(n, 0.0));
    for (auto& row : c.lm.probs) {
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      Shuffle(order, rng);
      double total = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        row[order[r]] = std::pow(spec_.kappa, -static_cast<double>(r));
        total += row[order[r]];
      }
      for (double& p : row) p /= total;
    }
  }

  std::vector<std::string> SampleSentence(const SynthCorpus& c, Rng& rng) const {
    const std::size_t len = UniformIn(rng, spec_.min_sentence_words, spec_.max_sentence_words);
    std::vector<std::string> words;
    std::size_t ctx = 0;
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t w = SampleIndex(c.lm.probs[ctx], rng);
      words.push_back(c.common_words[w]);
      ctx = w + 1;
    }
    return words;
  }

  // Words whose bigram probability after `ctx` is in the lower half.
  std::size_t SampleUnlikely(const SynthCorpus& c, std::size_t ctx, Rng& rng) const {
    const auto& row = c.lm.probs[ctx];
    std::vector<std::size_t> order(row.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
    const std::size_t start = order.size() / 2;
    return order[UniformIn(rng, start, order.size() - 1)];
  }

  std::vector<std::string> RareSentence(const SynthCorpus& c, const std::string& rare,
                                        Rng& rng) const {
    const std::size_t len =
        std::max<std::size_t>(2, UniformIn(rng, spec_.min_sentence_words, spec_.max_sentence_words));
    const std::size_t slot = UniformIn(rng, 1, len - 1);
    const std::size_t sibling = Index(c, c.rare_sibling.at(rare));
    // The word before the rare one is the context that most strongly
    // predicts the rare word's common sibling.
    std::size_t lead = 0;
    for (std::size_t w = 0; w < c.common_words.size(); ++w) {
      if (c.lm.probs[w + 1][sibling] > c.lm.probs[lead + 1][sibling]) lead = w;
    }
    std::vector<std::string> words(len);
    std::size_t ctx = 0;
    for (std::size_t i = 0; i < len; ++i) {
      std::size_t w;
      if (i == slot) {
        words[i] = rare;
        ctx = 0;  // no bigram statistics after a rare word; restart
        continue;
      }
      if (i + 1 == slot) {
        w = lead;
      } else if (i > 0 && i - 1 == slot) {
        w = UniformIn(rng, 0, c.common_words.size() - 1);
      } else {
        w = SampleUnlikely(c, ctx, rng);
      }
      words[i] = c.common_words[w];
      ctx = w + 1;
    }
    return words;
  }

  Tensor Frames(const std::vector<std::string>& words, Rng& rng) const {
    std::vector<std::size_t> identities;
    for (std::size_t k = 0; k < words.size(); ++k) {
      if (k > 0) {
        for (std::size_t f = 0; f < spec_.separator_frames; ++f) identities.push_back(spec_.n_phones);
      }
      for (char ch : words[k]) {
        const std::size_t p = static_cast<std::size_t>(
            std::find(kPhoneInventory, kPhoneInventory + spec_.n_phones, ch) - kPhoneInventory);
        const std::size_t n = UniformIn(rng, spec_.min_frames_per_phone, spec_.max_frames_per_phone);
        for (std::size_t f = 0; f < n; ++f) {
          identities.push_back(UniformUnit(rng) < spec_.rho ? Partner(p) : p);
        }
      }
    }
    const std::size_t dim = spec_.feature_dim();
    std::vector<double> values(identities.size() * dim);
    for (std::size_t t = 0; t < identities.size(); ++t) {
      for (std::size_t d = 0; d < dim; ++d) {
        values[t * dim + d] = (d == identities[t] ? 1.0 : 0.0) + spec_.sigma * Normal(rng);
      }
    }
    return Tensor({identities.size(), dim}, std::move(values));
  }

  SynthUtterance Utterance(const std::string& id, std::vector<std::string> words, Rng& rng) const {
    SynthUtterance u;
    u.id = id;
    u.frames = Frames(words, rng);
    for (const auto& w : words) {
      for (char ch : w) u.phones.emplace_back(1, ch);
    }
    u.words = std::move(words);
    return u;
  }

  std::size_t Partner(std::size_t p) const {
    const std::size_t q = p ^ 1;
    return q < spec_.n_phones ? q : p;
  }

 private:
  static std::size_t Index(const SynthCorpus& c, const std::string& word) {
    return static_cast<std::size_t>(
        std::find(c.common_words.begin(), c.common_words.end(), word) - c.common_words.begin());
  }

  const SynthSpec& spec_;
};

std::string UttId(const std::string& split, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%05zu", i);
  return split + "_" + buf;
}

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void SynthSpec::Validate() const {
  auto fail = [](const std::string& m) { throw TaskgenError("synth spec: " + m); };
  if (n_phones < 4 || n_phones > sizeof(kPhoneInventory) - 1) {
    fail("n_phones must be in [4, " + std::to_string(sizeof(kPhoneInventory) - 1) + "]");
  }
  if (n_common_words < 2) fail("need at least 2 common words");
  if (min_word_len < 2 || max_word_len > 5 || min_word_len > max_word_len) {
    fail("word lengths must satisfy 2 <= min <= max <= 5");
  }
  if (!(kappa >= 1.0)) fail("kappa must be >= 1");
  if (!(sigma >= 0.0)) fail("sigma must be >= 0");
  if (!(rho >= 0.0 && rho < 1.0)) fail("rho must be in [0, 1)");
  if (min_frames_per_phone < 1 || min_frames_per_phone > max_frames_per_phone) {
    fail("frames per phone must satisfy 1 <= min <= max");
  }
  if (min_sentence_words < 1 || min_sentence_words > max_sentence_words) {
    fail("sentence lengths must satisfy 1 <= min <= max");
  }
  if (rare_threshold < 1) fail("rare_threshold must be >= 1");
  if (rare_train_max >= rare_threshold) fail("rare_train_max must be below rare_threshold");
  // Distinct words of the requested lengths must exist.
  double capacity = 0.0;
  for (std::size_t len = min_word_len; len <= max_word_len; ++len) {
    capacity += std::pow(static_cast<double>(n_phones), static_cast<double>(len));
  }
  if (static_cast<double>(n_common_words + n_rare_words) > capacity / 2.0) {
    fail("too many words for the phone inventory");
  }
}

SynthSpec SynthSpec::FromConfig(const KeyValueConfig& cfg, std::uint64_t seed) {
  SynthSpec s;
  s.n_phones = cfg.GetSize("data.n_phones", s.n_phones);
  s.n_common_words = cfg.GetSize("data.n_common_words", s.n_common_words);
  s.n_rare_words = cfg.GetSize("data.n_rare_words", s.n_rare_words);
  s.min_word_len = cfg.GetSize("data.min_word_len", s.min_word_len);
  s.max_word_len = cfg.GetSize("data.max_word_len", s.max_word_len);
  s.kappa = cfg.GetDouble("data.kappa", s.kappa);
  s.min_frames_per_phone = cfg.GetSize("data.min_frames_per_phone", s.min_frames_per_phone);
  s.max_frames_per_phone = cfg.GetSize("data.max_frames_per_phone", s.max_frames_per_phone);
  s.separator_frames = cfg.GetSize("data.separator_frames", s.separator_frames);
  s.sigma = cfg.GetDouble("data.sigma", s.sigma);
  s.rho = cfg.GetDouble("data.rho", s.rho);
  s.min_sentence_words = cfg.GetSize("data.min_sentence_words", s.min_sentence_words);
  s.max_sentence_words = cfg.GetSize("data.max_sentence_words", s.max_sentence_words);
  s.rare_train_max = cfg.GetSize("data.rare_train_max", s.rare_train_max);
  s.rare_threshold = cfg.GetSize("metrics.rare_threshold", s.rare_threshold);
  s.seed = seed;
  s.Validate();
  return s;
}

SynthCorpus GenerateCorpus(const SynthSpec& spec, std::size_t n_train, std::size_t n_test_in,
                           std::size_t n_test_rare) {
  spec.Validate();
  if (n_test_rare > 0 && spec.n_rare_words == 0) {
    throw TaskgenError("word list too small for the rare split: no rare words");
  }
  SynthCorpus c;
  Generator gen(spec);
  gen.MakeWords(c);
  gen.MakeLm(c);

  std::vector<std::string> tokens{kBlankToken};
  for (std::size_t p = 0; p < spec.n_phones; ++p) tokens.push_back(PhoneSymbol(p));
  tokens.push_back(kWordSeparator);
  c.vocab = Vocabulary(tokens);
  std::map<std::string, Sequence> lex;
  for (const auto& w : c.common_words) lex[w] = Spell(w);
  for (const auto& w : c.rare_words) lex[w] = Spell(w);
  c.lexicon = Lexicon(std::move(lex));

  // Train text: bigram samples, then rare words planted over random slots.
  Rng text_rng = MakeRng(spec.seed, "data.text.train");
  std::vector<std::vector<std::string>> train_text(n_train);
  for (auto& s : train_text) s = gen.SampleSentence(c, text_rng);
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t i = 0; i < n_train; ++i) {
    for (std::size_t j = 0; j < train_text[i].size(); ++j) slots.emplace_back(i, j);
  }
  Shuffle(slots, text_rng);
  std::size_t next_slot = 0;
  for (const auto& rare : c.rare_words) {
    const std::size_t k = spec.rare_train_max == 0 ? 0 : UniformIn(text_rng, 1, spec.rare_train_max);
    for (std::size_t n = 0; n < k; ++n) {
      if (next_slot == slots.size()) throw TaskgenError("train split too small for rare words");
      const auto [i, j] = slots[next_slot++];
      train_text[i][j] = rare;
    }
  }

  Rng in_rng = MakeRng(spec.seed, "data.text.test_in");
  std::vector<std::vector<std::string>> in_text(n_test_in);
  for (auto& s : in_text) s = gen.SampleSentence(c, in_rng);

  Rng rare_rng = MakeRng(spec.seed, "data.text.test_rare");
  std::vector<std::string> rare_order = c.rare_words;
  std::vector<std::vector<std::string>> rare_text(n_test_rare);
  for (std::size_t i = 0; i < n_test_rare; ++i) {
    if (i % rare_order.size() == 0) Shuffle(rare_order, rare_rng);
    rare_text[i] = gen.RareSentence(c, rare_order[i % rare_order.size()], rare_rng);
  }

  for (const auto& s : train_text) {
    for (const auto& w : s) ++c.train_counts[w];
  }
  auto build = [&](const std::string& split, std::vector<std::vector<std::string>>& text) {
    Rng rng = MakeRng(spec.seed, "data.frames." + split);
    auto& out = c.splits[split];
    for (std::size_t i = 0; i < text.size(); ++i) {
      out.push_back(gen.Utterance(UttId(split, i), std::move(text[i]), rng));
    }
  };
  build("train", train_text);
  build("test_in", in_text);
  build("test_rare", rare_text);
  return c;
}

void WriteFeatures(const std::filesystem::path& path, const std::vector<Tensor>& frames) {
  std::ofstream out = OpenForWrite(path);
  out.write(kFeatsMagic, sizeof(kFeatsMagic));
  io::WriteU32(out, kFeatsVersion);
  io::WriteU32(out, static_cast<std::uint32_t>(frames.size()));
  for (const Tensor& f : frames) {
    io::WriteU32(out, static_cast<std::uint32_t>(f.dim(0)));
    io::WriteU32(out, static_cast<std::uint32_t>(f.dim(1)));
    io::WriteF64s(out, f.data());
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<Tensor> ReadFeatures(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || !std::equal(magic, magic + 8, kFeatsMagic)) {
    throw std::runtime_error(path.string() + ": not a feature file");
  }
  try {
    const std::uint32_t version = io::ReadU32(in);
    if (version != kFeatsVersion) {
      throw std::runtime_error(path.string() + ": unsupported version " + std::to_string(version));
    }
    const std::uint32_t count = io::ReadU32(in);
    std::vector<Tensor> out;
    out.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::size_t t = io::ReadU32(in), d = io::ReadU32(in);
      out.emplace_back(Shape{t, d}, io::ReadF64s(in, t * d));
    }
    return out;
  } catch (const io::TruncatedError&) {
    throw std::runtime_error(path.string() + ": truncated");
  }
}

void WriteCorpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [split, utts] : corpus.splits) {
    const auto sub = dir / split;
    std::filesystem::create_directories(sub);
    std::ofstream text = OpenForWrite(sub / "text.tsv");
    std::ofstream phones = OpenForWrite(sub / "phones.tsv");
    std::vector<Tensor> frames;
    for (const auto& u : utts) {
      text << u.id << '\t' << Join(u.words, " ") << '\n';
      phones << u.id << '\t' << Join(u.phones, " ") << '\n';
      frames.push_back(u.frames);
    }
    WriteFeatures(sub / "feats.bin", frames);
  }
  corpus.lexicon.Save(dir / "lexicon.tsv");
  corpus.vocab.Save(dir / "vocab.txt");
  std::ofstream counts = OpenForWrite(dir / "train_counts.tsv");
  const std::map<std::string, std::size_t> sorted(corpus.train_counts.begin(),
                                                  corpus.train_counts.end());
  for (const auto& [w, n] : sorted) counts << w << '\t' << n << '\n';
}

std::vector<Utterance> ReadSplit(const std::filesystem::path& dir, const std::string& split) {
  const auto sub = dir / split;
  std::ifstream text(sub / "text.tsv");
  if (!text) throw std::runtime_error("missing corpus split " + sub.string());
  std::vector<Tensor> frames = ReadFeatures(sub / "feats.bin");
  std::vector<Utterance> out;
  std::string line;
  while (std::getline(text, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw std::runtime_error(sub.string() + "/text.tsv: bad line");
    out.push_back({line.substr(0, tab), Tensor(), SplitWords(line.substr(tab + 1))});
  }
  if (out.size() != frames.size()) {
    throw std::runtime_error(sub.string() + ": text and features disagree on utterance count");
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].frames = std::move(frames[i]);
  return out;
}

WordCounts ReadWordCounts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  WordCounts counts;
  std::string word;
  std::size_t n;
  while (in >> word >> n) counts[word] = n;
  return counts;
}

std::vector<std::string> WordsToTokens(const std::vector<std::string>& words) {
  std::vector<std::string> tokens;
  for (std::size_t k = 0; k < words.size(); ++k) {
    if (k > 0) tokens.emplace_back(kWordSeparator);
    for (char ch : words[k]) tokens.emplace_back(1, ch);
  }
  return tokens;
}

std::vector<std::string> TokensToWords(const std::vector<std::string>& tokens) {
  std::vector<std::string> words;
  std::string current;
  for (const auto& t : tokens) {
    if (t == kWordSeparator) {
      if (!current.empty()) words.push_back(current);
      current.clear();
    } else {
      current += t;
    }
  }
  if (!current.empty()) words.push_back(current);
  return words;
}

std::vector<int> TokenIds(const Vocabulary& vocab, const std::vector<std::string>& words) {
  std::vector<int> ids;
  for (const auto& t : WordsToTokens(words)) ids.push_back(vocab.id(t));
  return ids;
}

std::vector<std::string> IdsToWords(const Vocabulary& vocab, const std::vector<int>& ids) {
  std::vector<std::string> tokens;
  for (int id : ids) tokens.push_back(vocab.token(id));
  return TokensToWords(tokens);
}

}  // namespace lat
