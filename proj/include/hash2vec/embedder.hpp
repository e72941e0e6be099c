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

// Single-pass hashed co-occurrence embeddings.
//
// For every token w at position p and every token c at position q of the same
// sentence with 1 <= |p - q| <= k:
//
//     table[w][h(c)] += xi(c) * f(|p - q|)
//
// The pass keeps only the last k word ids of the current sentence. When a
// token arrives it is paired with each token still in the window, and both
// rows are updated, so every ordered co-occurrence contributes exactly once.

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hash2vec/corpus.hpp"
#include "hash2vec/embedding_table.hpp"
#include "hash2vec/errors.hpp"
#include "hash2vec/hashing.hpp"

namespace hash2vec {

template <TokenHasher Hasher = SeededHasher>
class StreamingTrainer {
 public:
  StreamingTrainer(const TrainParams& params, Hasher hasher)
      : table_(params), hasher_(std::move(hasher)), weights_(fixed_weights(params.weight, params.window)) {
    if (hasher_.dimension() != params.dimension()) {
      throw ArgumentError("hasher dimension does not match params.n");
    }
  }

  explicit StreamingTrainer(const TrainParams& params)
    requires std::same_as<Hasher, SeededHasher>
      : StreamingTrainer(params, SeededHasher(params.hasher)) {}

  // Windows never cross sentence boundaries.
  void consume(const Sentence& sentence) {
    const std::size_t k = table_.params().window;
    window_.clear();
    for (const auto& token : sentence) {
      const std::size_t cur = lookup(token);
      const std::size_t reach = std::min(k, window_.size());
      for (std::size_t d = 1; d <= reach; ++d) {
        const std::size_t past = window_[window_.size() - d];
        const Fixed w = weights_[d];
        add(cur, bucket_[past], sign_[past] > 0 ? w : -w);
        add(past, bucket_[cur], sign_[cur] > 0 ? w : -w);
      }
      window_.push_back(cur);
      if (window_.size() > k) window_.erase(window_.begin());
    }
    table_.add_token_count(sentence.size());
  }

  const EmbeddingTable& table() const noexcept { return table_; }
  EmbeddingTable release() && { return std::move(table_); }

 private:
  std::size_t lookup(const std::string& token) {
    if (auto r = table_.find(token)) return *r;
    std::size_t r = table_.insert(token);
    bucket_.push_back(static_cast<std::uint32_t>(hasher_.index(token)));
    sign_.push_back(static_cast<std::int8_t>(hasher_.sign(token)));
    return r;
  }

  void add(std::size_t row, std::size_t col, Fixed delta) {
    Fixed& cell = table_.raw_row(row)[col];
    if (__builtin_add_overflow(cell, delta, &cell)) {
      throw TrainingError("accumulator overflow in vector of '" + table_.word(row) + "'");
    }
  }

  EmbeddingTable table_;
  Hasher hasher_;
  std::vector<Fixed> weights_;
  std::vector<std::uint32_t> bucket_;  // per row: h(word)
  std::vector<std::int8_t> sign_;      // per row: xi(word)
  std::vector<std::size_t> window_;    // at most k recent rows
};

template <TokenHasher Hasher>
EmbeddingTable train(const TokenStream& stream, const TrainParams& params, Hasher hasher) {
  if (stream.empty()) throw TrainingError("cannot train on an empty stream");
  StreamingTrainer<Hasher> trainer(params, std::move(hasher));
  for (const auto& s : stream) trainer.consume(s);
  return std::move(trainer).release();
}

inline EmbeddingTable train(const TokenStream& stream, const TrainParams& params) {
  params.validate();
  return train(stream, params, SeededHasher(params.hasher));
}

// ---------------------------------------------------------------------------
// Merge

inline void merge_into(EmbeddingTable& acc, const EmbeddingTable& other) {
  if (acc.params() != other.params()) {
    throw MergeError("cannot merge tables with different " + describe_mismatch(acc.params(), other.params()));
  }
  for (std::size_t r = 0; r < other.size(); ++r) {
    std::size_t dst = acc.insert(other.word(r));
    auto out = acc.raw_row(dst);
    auto in = other.raw_row(r);
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (__builtin_add_overflow(out[j], in[j], &out[j])) {
        throw MergeError("accumulator overflow in vector of '" + other.word(r) + "'");
      }
    }
  }
  acc.add_token_count(other.token_count());
}

// Componentwise sum over the union vocabulary. Associative and commutative.
inline EmbeddingTable merge(std::span<const EmbeddingTable> tables) {
  if (tables.empty()) throw MergeError("nothing to merge");
  EmbeddingTable out(tables.front().params());
  for (const auto& t : tables) merge_into(out, t);
  return out;
}

inline EmbeddingTable merge(std::initializer_list<EmbeddingTable> tables) {
  return merge(std::span<const EmbeddingTable>(tables.begin(), tables.size()));
}

// Contiguous sentence ranges, one per shard; empty ranges are allowed.
inline std::vector<std::pair<std::size_t, std::size_t>> shard_ranges(std::size_t sentences, std::size_t shards) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < shards; ++i) {
    out.emplace_back(sentences * i / shards, sentences * (i + 1) / shards);
  }
  return out;
}

// Trains contiguous sentence shards on separate threads and merges them.
// Output is identical to train(stream, params) for any shard count.
inline EmbeddingTable train_sharded(const TokenStream& stream, const TrainParams& params, std::size_t shards) {
  if (shards < 1) throw ArgumentError("shards must be >= 1");
  if (stream.empty()) throw TrainingError("cannot train on an empty stream");
  params.validate();
  std::vector<EmbeddingTable> parts(shards, EmbeddingTable(params));
  std::vector<std::exception_ptr> errors(shards);
  const auto ranges = shard_ranges(stream.size(), shards);
  {
    std::vector<std::jthread> workers;
    for (std::size_t i = 0; i < shards; ++i) {
      workers.emplace_back([&, i] {
        try {
          StreamingTrainer<> trainer(params);
          for (std::size_t s = ranges[i].first; s < ranges[i].second; ++s) trainer.consume(stream[s]);
          parts[i] = std::move(trainer).release();
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return merge(parts);
}

}  // namespace hash2vec
