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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hash2vec/errors.hpp"
#include "hash2vec/hashing.hpp"

namespace hash2vec {

// Vector components are accumulated as signed 64-bit fixed point with
// kFixedFractionBits fractional bits. Integer addition is associative, so the
// streaming pass, the batch projection and any shard merge order all produce
// the same bits. Values convert to double exactly while |x| < 2^29.
using Fixed = std::int64_t;
inline constexpr int kFixedFractionBits = 24;

inline Fixed to_fixed(double x) {
  double scaled = std::ldexp(x, kFixedFractionBits);
  if (!std::isfinite(scaled) || std::fabs(scaled) >= 0x1p63) {
    throw ArgumentError("value out of fixed-point range");
  }
  return static_cast<Fixed>(std::llround(scaled));
}

inline double to_double(Fixed x) noexcept { return std::ldexp(static_cast<double>(x), -kFixedFractionBits); }

// f(1..window) in fixed point; index 0 unused.
inline std::vector<Fixed> fixed_weights(const WeightSpec& spec, std::size_t window) {
  std::vector<Fixed> w(window + 1, 0);
  for (std::size_t d = 1; d <= window; ++d) w[d] = to_fixed(weight(static_cast<long long>(d), spec));
  return w;
}

struct TrainParams {
  std::size_t window = 5;  // k: context tokens on each side
  HasherSpec hasher;       // carries the embedding dimension n
  WeightSpec weight;

  std::size_t dimension() const noexcept { return hasher.dimension; }

  void validate() const {
    if (window < 1) throw ArgumentError("window must be >= 1");
    hasher.validate();
    weight.validate();
  }

  friend bool operator==(const TrainParams&, const TrainParams&) = default;
};

inline TrainParams make_params(std::size_t dimension, std::size_t window, std::uint32_t seed = kDefaultSeed) {
  return TrainParams{window, HasherSpec{dimension, seed, derive_sign_seed(seed)},
                     WeightSpec::gaussian_for_window(window)};
}

// Names of the fields on which two parameter sets differ, comma separated.
inline std::string describe_mismatch(const TrainParams& a, const TrainParams& b) {
  std::string out;
  auto note = [&](bool differs, const char* field) {
    if (!differs) return;
    if (!out.empty()) out += ", ";
    out += field;
  };
  note(a.hasher.dimension != b.hasher.dimension, "n");
  note(a.window != b.window, "k");
  note(a.weight.kind != b.weight.kind, "weight-kind");
  note(a.weight.sigma != b.weight.sigma, "sigma");
  note(a.hasher.seed != b.hasher.seed, "seed");
  note(a.hasher.sign_seed != b.hasher.sign_seed, "sign_seed");
  return out;
}

namespace detail {
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};
using WordIndex = std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>>;
}  // namespace detail

// Vocabulary -> fixed-width vectors, row-major, rows in first-insertion order.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(TrainParams params) : params_(params) { params_.validate(); }

  const TrainParams& params() const noexcept { return params_; }
  std::size_t dimension() const noexcept { return params_.dimension(); }
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }

  std::uint64_t token_count() const noexcept { return token_count_; }
  void add_token_count(std::uint64_t n) noexcept { token_count_ += n; }

  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::string& word(std::size_t row) const { return words_[row]; }

  std::optional<std::size_t> find(std::string_view word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view word) const { return index_.find(word) != index_.end(); }

  // Returns the row of `word`, appending a zero row if it is new.
  std::size_t insert(std::string_view word) {
    auto it = index_.find(word);
    if (it != index_.end()) return it->second;
    std::size_t row = words_.size();
    words_.emplace_back(word);
    index_.emplace(words_.back(), row);
    data_.resize(data_.size() + dimension(), 0);
    return row;
  }

  std::span<const Fixed> raw_row(std::size_t row) const {
    return {data_.data() + row * dimension(), dimension()};
  }
  std::span<Fixed> raw_row(std::size_t row) { return {data_.data() + row * dimension(), dimension()}; }

  std::vector<double> row(std::size_t r) const {
    auto raw = raw_row(r);
    std::vector<double> out(raw.size());
    for (std::size_t j = 0; j < raw.size(); ++j) out[j] = to_double(raw[j]);
    return out;
  }

  std::vector<double> vector(std::string_view word) const {
    auto r = find(word);
    if (!r) throw VocabularyError("unknown word '" + std::string(word) + "'");
    return row(*r);
  }

  // Heap bytes held by vectors and vocabulary (excluding hash-node overhead).
  std::size_t memory_bytes() const noexcept {
    std::size_t bytes = data_.capacity() * sizeof(Fixed) + words_.capacity() * sizeof(std::string);
    for (const auto& w : words_) bytes += w.capacity();
    return bytes;
  }

  void reserve(std::size_t words) {
    words_.reserve(words);
    index_.reserve(words);
    data_.reserve(words * dimension());
  }

  // Same params, token count and word -> vector mapping; row order is ignored.
  friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
    if (a.params_ != b.params_ || a.token_count_ != b.token_count_ || a.size() != b.size()) return false;
    for (std::size_t r = 0; r < a.size(); ++r) {
      auto other = b.find(a.words_[r]);
      if (!other) return false;
      auto x = a.raw_row(r);
      auto y = b.raw_row(*other);
      if (!std::equal(x.begin(), x.end(), y.begin())) return false;
    }
    return true;
  }

 private:
  TrainParams params_;
  std::uint64_t token_count_ = 0;
  std::vector<std::string> words_;
  detail::WordIndex index_;
  std::vector<Fixed> data_;
};

}  // namespace hash2vec
