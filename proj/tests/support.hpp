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

// hash2vec command line tool.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hash2vec/hash2vec.hpp"

namespace h2v_test {

// Random sentence-segmented stream over a Zipf-ish vocabulary of `vocab` words.
inline hash2vec::TokenStream random_stream(std::mt19937_64& rng, std::size_t tokens, std::size_t vocab) {
  std::vector<double> w(vocab);
  for (std::size_t i = 0; i < vocab; ++i) w[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::uniform_int_distribution<std::size_t> len(1, 12);
  hash2vec::TokenStream out;
  std::size_t made = 0;
  while (made < tokens) {
    hash2vec::Sentence s;
    std::size_t l = std::min(len(rng), tokens - made);
    for (std::size_t i = 0; i < l; ++i) s.push_back("w" + std::to_string(pick(rng)));
    made += l;
    out.push_back(std::move(s));
  }
  return out;
}

// Dense reference for the hashed table, by direct enumeration of every
// ordered pair of positions within the window, in double precision.
inline std::map<std::string, std::vector<double>> reference_table(const hash2vec::TokenStream& stream,
                                                                   const hash2vec::TrainParams& p) {
  std::map<std::string, std::vector<double>> out;
  const long long k = static_cast<long long>(p.window);
  for (const auto& s : stream) {
    const long long len = static_cast<long long>(s.size());
    for (long long i = 0; i < len; ++i) {
      auto& row = out[s[i]];
      row.resize(p.dimension(), 0.0);
      for (long long j = std::max(0LL, i - k); j <= std::min(len - 1, i + k); ++j) {
        if (j == i) continue;
        const long long d = std::llabs(i - j);
        const double f = p.weight.kind == hash2vec::WeightKind::constant
                             ? 1.0
                             : std::exp(-std::pow(static_cast<double>(d) / p.weight.sigma, 2.0));
        row[hash2vec::index_hash(s[j], p.hasher)] += hash2vec::sign_hash(s[j], p.hasher) * f;
      }
    }
  }
  return out;
}

inline std::string data_path(const std::string& name) { return std::string(HASH2VEC_TEST_DATA_DIR) + "/" + name; }

}  // namespace h2v_test
