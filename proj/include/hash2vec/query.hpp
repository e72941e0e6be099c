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
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hash2vec/embedding_table.hpp"
#include "hash2vec/errors.hpp"

namespace hash2vec {

struct Neighbor {
  std::string word;
  double score = 0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

inline double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw ArgumentError("cosine of vectors with different lengths");
  long double dot = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<long double>(u[i]) * v[i];
    uu += static_cast<long double>(u[i]) * u[i];
    vv += static_cast<long double>(v[i]) * v[i];
  }
  if (uu == 0 || vv == 0) throw UndefinedError("cosine similarity undefined for a zero vector");
  return static_cast<double>(dot / std::sqrt(uu * vv));
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

enum class AnalogyMode {
  cosine,      // cos(w, x + y - z) on raw vectors
  additive,    // cos(w, x) + cos(w, y) - cos(w, z)
  raw_dot,     // <w, x + y - z>, unnormalized
};

// Brute-force similarity search over an immutable table. Rows are converted
// to double and unit-normalized once; zero rows never appear as results.
class QueryIndex {
 public:
  explicit QueryIndex(const EmbeddingTable& table) : table_(table), n_(table.dimension()) {
    unit_.resize(table.size() * n_);
    raw_.resize(table.size() * n_);
    norm_.resize(table.size());
    for (std::size_t r = 0; r < table.size(); ++r) {
      auto src = table.raw_row(r);
      long double ss = 0;
      for (std::size_t j = 0; j < n_; ++j) {
        double v = to_double(src[j]);
        raw_[r * n_ + j] = v;
        ss += static_cast<long double>(v) * v;
      }
      norm_[r] = static_cast<double>(std::sqrt(ss));
      for (std::size_t j = 0; j < n_; ++j) unit_[r * n_ + j] = norm_[r] > 0 ? raw_[r * n_ + j] / norm_[r] : 0.0;
    }
  }

  const EmbeddingTable& table() const noexcept { return table_; }

  std::size_t require(std::string_view word) const {
    if (auto r = table_.find(word)) return *r;
    throw VocabularyError("unknown word '" + std::string(word) + "'" + suggestions(word));
  }

  std::span<const double> vector(std::size_t row) const { return {raw_.data() + row * n_, n_}; }

  std::vector<Neighbor> nearest(std::string_view word, std::size_t topk) const {
    std::size_t q = require(word);
    if (topk == 0) return {};
    if (norm_[q] == 0) throw UndefinedError("'" + std::string(word) + "' has a zero vector");
    std::vector<double> scores(table_.size());
    for (std::size_t r = 0; r < table_.size(); ++r) scores[r] = dot_unit(q, r);
    return top(scores, topk, [&](std::size_t r) { return r != q; });
  }

  std::vector<Neighbor> analogy(std::string_view x, std::string_view y, std::string_view z, std::size_t topk,
                                AnalogyMode mode = AnalogyMode::cosine) const {
    const std::size_t ix = require(x), iy = require(y), iz = require(z);
    if (topk == 0) return {};
    auto excluded = [&](std::size_t r) { return r != ix && r != iy && r != iz; };
    std::vector<double> scores(table_.size(), 0.0);

    if (mode == AnalogyMode::additive) {
      for (std::size_t r : {ix, iy, iz}) {
        if (norm_[r] == 0) throw UndefinedError("'" + table_.word(r) + "' has a zero vector");
      }
      for (std::size_t r = 0; r < table_.size(); ++r) {
        scores[r] = dot_unit(r, ix) + dot_unit(r, iy) - dot_unit(r, iz);
      }
      return top(scores, topk, excluded);
    }

    std::vector<double> target(n_);
    for (std::size_t j = 0; j < n_; ++j) target[j] = raw_[ix * n_ + j] + raw_[iy * n_ + j] - raw_[iz * n_ + j];
    long double tt = 0;
    for (double v : target) tt += static_cast<long double>(v) * v;
    if (mode == AnalogyMode::cosine && tt == 0) throw UndefinedError("analogy target x + y - z is the zero vector");
    const double tnorm = static_cast<double>(std::sqrt(tt));
    for (std::size_t r = 0; r < table_.size(); ++r) {
      const double* row = mode == AnalogyMode::cosine ? &unit_[r * n_] : &raw_[r * n_];
      long double s = 0;
      for (std::size_t j = 0; j < n_; ++j) s += static_cast<long double>(row[j]) * target[j];
      scores[r] = mode == AnalogyMode::cosine ? static_cast<double>(s) / tnorm : static_cast<double>(s);
    }
    return top(scores, topk, excluded);
  }

 private:
  double dot_unit(std::size_t a, std::size_t b) const {
    long double s = 0;
    const double* pa = &unit_[a * n_];
    const double* pb = &unit_[b * n_];
    for (std::size_t j = 0; j < n_; ++j) s += static_cast<long double>(pa[j]) * pb[j];
    return static_cast<double>(s);
  }

  // Highest scores first, ties broken by word.
  template <class Keep>
  std::vector<Neighbor> top(const std::vector<double>& scores, std::size_t topk, Keep keep) const {
    std::vector<std::size_t> cand;
    cand.reserve(scores.size());
    for (std::size_t r = 0; r < scores.size(); ++r) {
      if (norm_[r] > 0 && keep(r)) cand.push_back(r);
    }
    auto better = [&](std::size_t a, std::size_t b) {
      return scores[a] != scores[b] ? scores[a] > scores[b] : table_.word(a) < table_.word(b);
    };
    std::size_t k = std::min(topk, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(), better);
    std::vector<Neighbor> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back({table_.word(cand[i]), scores[cand[i]]});
    return out;
  }

  std::string suggestions(std::string_view word) const {
    std::vector<std::pair<std::size_t, const std::string*>> d;
    for (const auto& w : table_.words()) d.emplace_back(edit_distance(word, w), &w);
    std::size_t k = std::min<std::size_t>(3, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : *a.second < *b.second;
    });
    if (k == 0) return "";
    std::string s = "; did you mean";
    for (std::size_t i = 0; i < k; ++i) s += (i ? ", " : " ") + *d[i].second;
    return s + "?";
  }

  const EmbeddingTable& table_;
  std::size_t n_;
  std::vector<double> raw_;
  std::vector<double> unit_;
  std::vector<double> norm_;
};

inline std::vector<Neighbor> nearest(const EmbeddingTable& table, std::string_view word, std::size_t topk) {
  return QueryIndex(table).nearest(word, topk);
}

inline std::vector<Neighbor> analogy(const EmbeddingTable& table, std::string_view x, std::string_view y,
                                     std::string_view z, std::size_t topk, AnalogyMode mode = AnalogyMode::cosine) {
  return QueryIndex(table).analogy(x, y, z, topk, mode);
}

}  // namespace hash2vec
