/*
 * Copyright 2026 The hash2vec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Corpus ingestion: tokenization, frequency counting, stop-word and percentile
// filtering, phrase joining and sentence subsampling.
//
// Every stage works on whole sentences so it can run either over an in-memory
// TokenStream or over a file that is re-read once per statistics pass
// (see Preprocessor).

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hash2vec/detail/utf8.hpp"
#include "hash2vec/errors.hpp"

namespace hash2vec {

using Sentence = std::vector<std::string>;

// Sentence-segmented token sequence. Holds no empty sentences and no empty or
// whitespace-bearing tokens.
class TokenStream {
 public:
  TokenStream() = default;
  TokenStream(std::initializer_list<Sentence> sentences) {
    for (const auto& s : sentences) push_back(s);
  }
  explicit TokenStream(std::vector<Sentence> sentences) {
    sentences_.reserve(sentences.size());
    for (auto& s : sentences) push_back(std::move(s));
  }

  // Empty sentences are dropped silently; bad tokens throw.
  void push_back(Sentence sentence) {
    if (sentence.empty()) return;
    for (const auto& token : sentence) check_token(token);
    token_count_ += sentence.size();
    sentences_.push_back(std::move(sentence));
  }

  const std::vector<Sentence>& sentences() const noexcept { return sentences_; }
  const Sentence& operator[](std::size_t i) const { return sentences_[i]; }
  std::size_t size() const noexcept { return sentences_.size(); }
  bool empty() const noexcept { return sentences_.empty(); }
  std::size_t token_count() const noexcept { return token_count_; }
  auto begin() const noexcept { return sentences_.begin(); }
  auto end() const noexcept { return sentences_.end(); }

  friend bool operator==(const TokenStream& a, const TokenStream& b) {
    return a.sentences_ == b.sentences_;
  }

  static void check_token(std::string_view token) {
    if (token.empty()) throw ArgumentError("empty token");
    for (char c : token) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
        throw ArgumentError("token contains whitespace: '" + std::string(token) + "'");
      }
    }
  }

 private:
  std::vector<Sentence> sentences_;
  std::size_t token_count_ = 0;
};

// Streaming tokenizer. Text can be fed in arbitrary chunks; completed
// sentences are handed to the sink as they close.
//
// Rules: lowercase; sentences end at . ! ? and newline; tokens end at
// whitespace and punctuation; apostrophes, hyphens and underscores are kept
// only between two word characters.
class Tokenizer {
 public:
  template <class Sink>
  void feed(std::string_view chunk, Sink&& sink) {
    for (char ch : chunk) {
      auto cp = decoder_.feed(static_cast<unsigned char>(ch), offset_++);
      if (cp) step(*cp, sink);
    }
  }

  template <class Sink>
  void finish(Sink&& sink) {
    decoder_.finish(offset_);
    pending_ = 0;
    end_token();
    end_sentence(sink);
  }

  std::size_t bytes_consumed() const noexcept { return offset_; }

 private:
  template <class Sink>
  void step(char32_t cp, Sink& sink) {
    if (detail::is_word_char(cp)) {
      if (pending_ != 0) {
        token_.push_back(pending_);
        pending_ = 0;
      }
      detail::append_utf8(token_, detail::to_lower(cp));
    } else if (char j = detail::joiner_of(cp); j != 0) {
      if (!token_.empty() && pending_ == 0) {
        pending_ = j;
      } else {
        pending_ = 0;
        end_token();
      }
    } else {
      pending_ = 0;
      end_token();
      if (detail::is_sentence_terminal(cp)) end_sentence(sink);
    }
  }

  void end_token() {
    if (!token_.empty()) sentence_.push_back(std::move(token_));
    token_.clear();
  }

  template <class Sink>
  void end_sentence(Sink& sink) {
    if (!sentence_.empty()) sink(std::move(sentence_));
    sentence_.clear();
  }

  detail::Utf8Decoder decoder_;
  std::size_t offset_ = 0;
  std::string token_;
  Sentence sentence_;
  char pending_ = 0;
};

inline TokenStream tokenize(std::string_view text) {
  TokenStream stream;
  Tokenizer tokenizer;
  auto sink = [&](Sentence&& s) { stream.push_back(std::move(s)); };
  tokenizer.feed(text, sink);
  tokenizer.finish(sink);
  return stream;
}

// Tokenizes a file block by block without holding it in memory.
template <class Sink>
void tokenize_file(const std::string& path, Sink&& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  Tokenizer tokenizer;
  std::string buffer(1 << 16, '\0');
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    tokenizer.feed(std::string_view(buffer.data(), got), sink);
  }
  if (in.bad()) throw IoError("read failed on " + path);
  tokenizer.finish(sink);
}

inline TokenStream read_token_stream(const std::string& path) {
  TokenStream stream;
  tokenize_file(path, [&](Sentence&& s) { stream.push_back(std::move(s)); });
  return stream;
}

// ---------------------------------------------------------------------------
// Frequencies

struct FrequencyTable {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(const Sentence& sentence) {
    for (const auto& t : sentence) ++counts[t];
    total += sentence.size();
  }

  // Shard tables combine by addition.
  FrequencyTable& operator+=(const FrequencyTable& other) {
    for (const auto& [token, n] : other.counts) counts[token] += n;
    total += other.total;
    return *this;
  }

  std::uint64_t count(const std::string& token) const {
    auto it = counts.find(token);
    return it == counts.end() ? 0 : it->second;
  }

  // Distinct tokens by descending count, ties lexicographic.
  std::vector<std::pair<std::string, std::uint64_t>> ranked() const {
    std::vector<std::pair<std::string, std::uint64_t>> out(counts.begin(), counts.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    return out;
  }

  friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;
};

inline FrequencyTable count_frequencies(const TokenStream& stream) {
  FrequencyTable table;
  for (const auto& s : stream) table.add(s);
  return table;
}

// ---------------------------------------------------------------------------
// Filtering

struct FilterConfig {
  std::unordered_set<std::string> stoplist;
  // Tokens whose frequency-rank position lies above this fraction of the
  // token mass are removed. Must be in (0, 1].
  std::optional<double> percentile;
  // Keep at most this many distinct tokens (the most frequent survivors).
  std::optional<std::size_t> max_vocab;

  bool needs_frequencies() const noexcept { return percentile.has_value() || max_vocab.has_value(); }
};

inline std::unordered_set<std::string> read_stoplist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stoplist " + path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto e = line.find_last_not_of(" \t\r");
    words.insert(detail::lowercase(std::string_view(line).substr(b, e - b + 1)));
  }
  return words;
}

class TokenFilter {
 public:
  TokenFilter(const FrequencyTable& freqs, FilterConfig cfg) : removed_(std::move(cfg.stoplist)) {
    if (cfg.percentile && !(*cfg.percentile > 0.0 && *cfg.percentile <= 1.0)) {
      throw ArgumentError("percentile must lie in (0, 1]");
    }
    if (cfg.max_vocab && *cfg.max_vocab == 0) throw ArgumentError("max_vocab must be positive");
    if (!cfg.needs_frequencies()) return;

    auto ranked = freqs.ranked();
    if (cfg.percentile && freqs.total > 0) {
      // Mass at or below a token's rank: the token occupies the percentile
      // band (mass of rarer tokens, that + own count] of the distribution.
      std::vector<bool> drop(ranked.size(), false);
      std::uint64_t at_or_below = 0;
      for (std::size_t i = ranked.size(); i-- > 0;) {
        at_or_below += ranked[i].second;
        drop[i] = static_cast<double>(at_or_below) / static_cast<double>(freqs.total) > *cfg.percentile;
      }
      for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (drop[i]) removed_.insert(ranked[i].first);
      }
    }
    if (cfg.max_vocab) {
      allowed_.emplace();
      for (const auto& [token, n] : ranked) {
        if (allowed_->size() == *cfg.max_vocab) break;
        if (!removed_.contains(token)) allowed_->insert(token);
      }
    }
  }

  bool keeps(const std::string& token) const {
    if (removed_.contains(token)) return false;
    return !allowed_ || allowed_->contains(token);
  }

  void apply(Sentence& sentence) const {
    std::erase_if(sentence, [&](const std::string& t) { return !keeps(t); });
  }

 private:
  std::unordered_set<std::string> removed_;
  std::optional<std::unordered_set<std::string>> allowed_;
};

inline TokenStream filter_tokens(const TokenStream& stream, const FrequencyTable& freqs, FilterConfig cfg) {
  TokenFilter filter(freqs, std::move(cfg));
  TokenStream out;
  for (Sentence s : stream) {
    filter.apply(s);
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Phrases

struct PhraseConfig {
  double discount = 5.0;
  double threshold = 1e-4;
  int passes = 1;

  void validate() const {
    if (passes < 1) throw ArgumentError("phrase passes must be >= 1");
    if (!(threshold > 0.0)) throw ArgumentError("phrase threshold must be positive");
    if (!(discount >= 0.0)) throw ArgumentError("phrase discount must be non-negative");
  }
};

inline constexpr char kPhraseSeparator = '_';

struct BigramCounts {
  std::unordered_map<std::string, std::uint64_t> counts;  // key "a b"

  static std::string key(const std::string& a, const std::string& b) {
    std::string k;
    k.reserve(a.size() + b.size() + 1);
    k.append(a).push_back(' ');
    k.append(b);
    return k;
  }

  void add(const Sentence& s) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) ++counts[key(s[i], s[i + 1])];
  }

  std::uint64_t count(const std::string& a, const std::string& b) const {
    auto it = counts.find(key(a, b));
    return it == counts.end() ? 0 : it->second;
  }
};

// One greedy left-to-right joining pass with fixed statistics.
class PhraseJoiner {
 public:
  PhraseJoiner(FrequencyTable unigrams, BigramCounts bigrams, const PhraseConfig& cfg)
      : unigrams_(std::move(unigrams)), bigrams_(std::move(bigrams)), cfg_(cfg) {
    cfg_.validate();
  }

  // (count(ab) - discount) / (count(a) * count(b))
  double score(const std::string& a, const std::string& b) const {
    auto ca = unigrams_.count(a);
    auto cb = unigrams_.count(b);
    if (ca == 0 || cb == 0) return 0.0;
    auto cab = static_cast<double>(bigrams_.count(a, b));
    return (cab - cfg_.discount) / (static_cast<double>(ca) * static_cast<double>(cb));
  }

  void apply(Sentence& sentence) const {
    Sentence out;
    out.reserve(sentence.size());
    for (std::size_t i = 0; i < sentence.size();) {
      if (i + 1 < sentence.size() && score(sentence[i], sentence[i + 1]) > cfg_.threshold) {
        out.push_back(sentence[i] + kPhraseSeparator + sentence[i + 1]);
        i += 2;
      } else {
        out.push_back(std::move(sentence[i]));
        ++i;
      }
    }
    sentence = std::move(out);
  }

 private:
  FrequencyTable unigrams_;
  BigramCounts bigrams_;
  PhraseConfig cfg_;
};

inline TokenStream join_phrases(const TokenStream& stream, const FrequencyTable& freqs, const PhraseConfig& cfg) {
  cfg.validate();
  TokenStream current = stream;
  FrequencyTable unigrams = freqs;
  for (int pass = 0; pass < cfg.passes; ++pass) {
    if (pass > 0) unigrams = count_frequencies(current);
    BigramCounts bigrams;
    for (const auto& s : current) bigrams.add(s);
    PhraseJoiner joiner(std::move(unigrams), std::move(bigrams), cfg);
    TokenStream next;
    for (Sentence s : current) {
      joiner.apply(s);
      next.push_back(std::move(s));
    }
    current = std::move(next);
  }
  return current;
}

// ---------------------------------------------------------------------------
// Sampling

struct SamplerConfig {
  double keep_probability = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(keep_probability > 0.0 && keep_probability <= 1.0)) {
      throw ArgumentError("keep_probability must lie in (0, 1]");
    }
  }
};

// One uniform draw per sentence, in stream order.
class SentenceSampler {
 public:
  explicit SentenceSampler(const SamplerConfig& cfg) : cfg_(cfg), rng_(cfg.seed) { cfg_.validate(); }

  bool keep() {
    // 53-bit uniform in [0, 1); spelled out so results match across standard libraries.
    double u = static_cast<double>(rng_() >> 11) * 0x1p-53;
    return u < cfg_.keep_probability;
  }

 private:
  SamplerConfig cfg_;
  std::mt19937_64 rng_;
};

inline TokenStream sample_sentences(const TokenStream& stream, const SamplerConfig& cfg) {
  SentenceSampler sampler(cfg);
  TokenStream out;
  for (const auto& s : stream) {
    if (sampler.keep()) out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Multi-pass pipeline over a replayable source

struct PreprocessConfig {
  std::optional<FilterConfig> filter;
  std::optional<PhraseConfig> phrases;
  std::optional<SamplerConfig> sampler;
};

// A source is any callable that, given a sink, replays the whole corpus as
// sentences: source(sink) calls sink(Sentence&&) once per sentence.
class Preprocessor {
 public:
  template <class Source>
  static Preprocessor prepare(Source&& source, const PreprocessConfig& cfg) {
    Preprocessor p;
    if (cfg.filter) {
      FrequencyTable freqs;
      if (cfg.filter->needs_frequencies()) {
        source([&](Sentence&& s) { freqs.add(s); });
      }
      p.filter_.emplace(freqs, *cfg.filter);
    }
    if (cfg.phrases) {
      cfg.phrases->validate();
      for (int pass = 0; pass < cfg.phrases->passes; ++pass) {
        FrequencyTable unigrams;
        BigramCounts bigrams;
        source([&](Sentence&& s) {
          if (p.transform(s)) {
            unigrams.add(s);
            bigrams.add(s);
          }
        });
        p.joiners_.emplace_back(std::move(unigrams), std::move(bigrams), *cfg.phrases);
      }
    }
    if (cfg.sampler) p.sampler_.emplace(*cfg.sampler);
    return p;
  }

  // Runs all stages on one sentence; false means the sentence is dropped.
  // Stateful (the sampler advances), so apply to sentences in corpus order.
  bool apply(Sentence& sentence) {
    if (!transform(sentence)) return false;
    return !sampler_ || sampler_->keep();
  }

  TokenStream run(const TokenStream& stream) {
    TokenStream out;
    for (Sentence s : stream) {
      if (apply(s)) out.push_back(std::move(s));
    }
    return out;
  }

 private:
  bool transform(Sentence& sentence) const {
    if (filter_) filter_->apply(sentence);
    for (const auto& j : joiners_) j.apply(sentence);
    return !sentence.empty();
  }

  std::optional<TokenFilter> filter_;
  std::vector<PhraseJoiner> joiners_;
  std::optional<SentenceSampler> sampler_;
};

inline TokenStream preprocess(const TokenStream& stream, const PreprocessConfig& cfg) {
  auto source = [&](auto&& sink) {
    for (Sentence s : stream) sink(std::move(s));
  };
  return Preprocessor::prepare(source, cfg).run(stream);
}

}  // namespace hash2vec
