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

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hash2vec/errors.hpp"

namespace hash2vec {

// MurmurHash3_x86_32 (Austin Appleby, public domain). Input bytes are read
// little-endian so results are identical on every platform.
constexpr std::uint32_t murmur3_32(std::string_view key, std::uint32_t seed) noexcept {
  constexpr std::uint32_t c1 = 0xcc9e2d51;
  constexpr std::uint32_t c2 = 0x1b873593;
  auto rotl = [](std::uint32_t x, int r) { return (x << r) | (x >> (32 - r)); };
  auto byte = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(key[i])); };

  const std::size_t len = key.size();
  const std::size_t nblocks = len / 4;
  std::uint32_t h = seed;
  for (std::size_t b = 0; b < nblocks; ++b) {
    std::size_t i = b * 4;
    std::uint32_t k = byte(i) | (byte(i + 1) << 8) | (byte(i + 2) << 16) | (byte(i + 3) << 24);
    k *= c1;
    k = rotl(k, 15);
    k *= c2;
    h ^= k;
    h = rotl(h, 13);
    h = h * 5 + 0xe6546b64;
  }
  std::uint32_t k = 0;
  const std::size_t tail = nblocks * 4;
  switch (len & 3) {
    case 3:
      k ^= byte(tail + 2) << 16;
      [[fallthrough]];
    case 2:
      k ^= byte(tail + 1) << 8;
      [[fallthrough]];
    case 1:
      k ^= byte(tail);
      k *= c1;
      k = rotl(k, 15);
      k *= c2;
      h ^= k;
  }
  h ^= static_cast<std::uint32_t>(len);
  h ^= h >> 16;
  h *= 0x85ebca6b;
  h ^= h >> 13;
  h *= 0xc2b2ae35;
  h ^= h >> 16;
  return h;
}

inline constexpr std::uint32_t kDefaultSeed = 1;

// Sign seed used when only the bucket seed is given.
constexpr std::uint32_t derive_sign_seed(std::uint32_t seed) noexcept { return seed ^ 0x9e3779b9u; }

struct HasherSpec {
  std::size_t dimension = 0;
  std::uint32_t seed = kDefaultSeed;
  std::uint32_t sign_seed = derive_sign_seed(kDefaultSeed);

  void validate() const {
    if (dimension < 1) throw ArgumentError("dimension must be >= 1");
    // With equal seeds the sign would be the low bit of the bucket hash.
    if (seed == sign_seed) throw ArgumentError("sign_seed must differ from seed");
  }

  friend bool operator==(const HasherSpec&, const HasherSpec&) = default;
};

inline void check_token_argument(std::string_view token) {
  if (token.empty()) throw ArgumentError("cannot hash an empty token");
}

// Bucket h(token) in [0, dimension).
inline std::size_t index_hash(std::string_view token, const HasherSpec& spec) {
  check_token_argument(token);
  if (spec.dimension < 1) throw ArgumentError("dimension must be >= 1");
  return murmur3_32(token, spec.seed) % spec.dimension;
}

// Sign xi(token) in {-1, +1}.
inline int sign_hash(std::string_view token, const HasherSpec& spec) {
  check_token_argument(token);
  return (murmur3_32(token, spec.sign_seed) & 1u) ? 1 : -1;
}

// ---------------------------------------------------------------------------
// Weighting

enum class WeightKind { constant, gaussian };

inline const char* to_string(WeightKind kind) noexcept {
  return kind == WeightKind::constant ? "constant" : "gaussian";
}

inline WeightKind parse_weight_kind(std::string_view s) {
  if (s == "constant") return WeightKind::constant;
  if (s == "gaussian") return WeightKind::gaussian;
  throw ArgumentError("unknown weight kind '" + std::string(s) + "'");
}

struct WeightSpec {
  WeightKind kind = WeightKind::gaussian;
  double sigma = 1.0;  // gaussian only

  static WeightSpec constant() { return {WeightKind::constant, 0.0}; }
  static WeightSpec gaussian(double sigma) { return {WeightKind::gaussian, sigma}; }
  // sigma = k/2 puts the window edge at e^-4.
  static WeightSpec gaussian_for_window(std::size_t window) {
    return gaussian(static_cast<double>(window) / 2.0);
  }

  void validate() const {
    if (kind == WeightKind::gaussian && !(sigma > 0.0 && std::isfinite(sigma))) {
      throw ArgumentError("gaussian sigma must be positive and finite");
    }
  }

  friend bool operator==(const WeightSpec&, const WeightSpec&) = default;
};

// f(d): 1 for constant, exp(-(d/sigma)^2) for gaussian.
inline double weight(long long distance, const WeightSpec& spec) {
  if (distance < 1) throw ArgumentError("weight distance must be >= 1");
  spec.validate();
  if (spec.kind == WeightKind::constant) return 1.0;
  double r = static_cast<double>(distance) / spec.sigma;
  return std::exp(-r * r);
}

// ---------------------------------------------------------------------------
// Hasher objects used by the trainer and the projection.

template <class H>
concept TokenHasher = requires(const H& h, std::string_view token) {
  { h.dimension() } -> std::convertible_to<std::size_t>;
  { h.index(token) } -> std::convertible_to<std::size_t>;
  { h.sign(token) } -> std::convertible_to<int>;
};

// The production hasher: murmur3 buckets and signs under a HasherSpec.
class SeededHasher {
 public:
  explicit SeededHasher(const HasherSpec& spec) : spec_(spec) { spec_.validate(); }
  std::size_t dimension() const noexcept { return spec_.dimension; }
  std::size_t index(std::string_view token) const { return index_hash(token, spec_); }
  int sign(std::string_view token) const { return sign_hash(token, spec_); }
  const HasherSpec& spec() const noexcept { return spec_; }

 private:
  HasherSpec spec_;
};

// Collision-free assignment: word i of the list goes to bucket i. For the
// lossless limit, where hashing reduces to a column permutation.
class VocabularyHasher {
 public:
  explicit VocabularyHasher(const std::vector<std::string>& words, std::size_t dimension = 0) {
    for (const auto& w : words) buckets_.try_emplace(w, buckets_.size());
    dimension_ = dimension == 0 ? buckets_.size() : dimension;
    if (dimension_ < buckets_.size()) throw ArgumentError("dimension smaller than vocabulary");
    if (dimension_ == 0) dimension_ = 1;
  }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t index(std::string_view token) const {
    auto it = buckets_.find(std::string(token));
    if (it == buckets_.end()) throw ArgumentError("token outside hasher vocabulary: " + std::string(token));
    return it->second;
  }
  int sign(std::string_view) const noexcept { return 1; }

 private:
  std::unordered_map<std::string, std::size_t> buckets_;
  std::size_t dimension_ = 0;
};

// Wraps a hasher and forces xi == +1.
template <TokenHasher H>
class UnsignedHasher {
 public:
  explicit UnsignedHasher(H inner) : inner_(std::move(inner)) {}
  std::size_t dimension() const { return inner_.dimension(); }
  std::size_t index(std::string_view token) const { return inner_.index(token); }
  int sign(std::string_view) const noexcept { return 1; }

 private:
  H inner_;
};

}  // namespace hash2vec
