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

// Exact weighted co-occurrence matrix for desk-scale corpora.
//
// The matrix is built by enumerating every (position, position) pair of each
// sentence, not by the sliding window of the trainer, and the hashed table is
// then obtained by projecting whole rows. project(build_cooccurrence(s)) must
// match train(s) bit for bit; distortion() measures how well the hashed inner
// products track the exact ones.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hash2vec/corpus.hpp"
#include "hash2vec/embedding_table.hpp"
#include "hash2vec/errors.hpp"
#include "hash2vec/hashing.hpp"
#include "hash2vec/statistics.hpp"

namespace hash2vec {

struct OracleOptions {
  // Upper bound on materialized rows; the matrix is quadratic in this.
  std::size_t vocab_cap = 50'000;
  // Materialize only these rows (columns still span the whole vocabulary).
  std::optional<std::unordered_set<std::string>> rows;
};

class CooccurrenceMatrix {
 public:
  struct Entry {
    std::uint32_t column;
    Fixed weight;
  };

  CooccurrenceMatrix(std::size_t window, WeightSpec weight) : window_(window), weight_(weight) {}

  std::size_t window() const noexcept { return window_; }
  const WeightSpec& weight_spec() const noexcept { return weight_; }
  std::uint64_t token_count() const noexcept { return token_count_; }
  // True when only a subset of rows was materialized.
  bool restricted() const noexcept { return restricted_; }

  // All words seen, in first-occurrence order. Column ids index this list.
  const std::vector<std::string>& words() const noexcept { return words_; }
  std::optional<std::size_t> find(std::string_view word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool has_row(std::size_t id) const noexcept { return row_slot_[id] != kNoRow; }
  // Sorted by column.
  std::span<const Entry> row(std::size_t id) const {
    if (!has_row(id)) return {};
    return rows_[row_slot_[id]];
  }
  std::size_t row_count() const noexcept { return rows_.size(); }
  std::size_t nonzeros() const noexcept {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.size();
    return n;
  }

  double entry(std::string_view a, std::string_view b) const {
    auto ia = find(a);
    auto ib = find(b);
    if (!ia || !ib) return 0.0;
    return to_double(entry_fixed(*ia, *ib));
  }

  Fixed entry_fixed(std::size_t a, std::size_t b) const {
    auto r = row(a);
    auto it = std::lower_bound(r.begin(), r.end(), b, [](const Entry& e, std::size_t c) { return e.column < c; });
    return (it != r.end() && it->column == b) ? it->weight : 0;
  }

  double squared_norm(std::size_t id) const {
    long double s = 0;
    for (const auto& e : row(id)) {
      long double v = to_double(e.weight);
      s += v * v;
    }
    return static_cast<double>(s);
  }

  double dot(std::size_t a, std::size_t b) const {
    auto ra = row(a);
    auto rb = row(b);
    long double s = 0;
    std::size_t i = 0, j = 0;
    while (i < ra.size() && j < rb.size()) {
      if (ra[i].column < rb[j].column) {
        ++i;
      } else if (rb[j].column < ra[i].column) {
        ++j;
      } else {
        s += static_cast<long double>(to_double(ra[i].weight)) * to_double(rb[j].weight);
        ++i;
        ++j;
      }
    }
    return static_cast<double>(s);
  }

 private:
  static constexpr std::size_t kNoRow = static_cast<std::size_t>(-1);

  friend CooccurrenceMatrix build_cooccurrence(const TokenStream&, std::size_t, const WeightSpec&,
                                               const OracleOptions&);

  std::size_t window_;
  WeightSpec weight_;
  std::uint64_t token_count_ = 0;
  bool restricted_ = false;
  std::vector<std::string> words_;
  detail::WordIndex index_;
  std::vector<std::size_t> row_slot_;  // word id -> index into rows_
  std::vector<std::vector<Entry>> rows_;
};

inline CooccurrenceMatrix build_cooccurrence(const TokenStream& stream, std::size_t window, const WeightSpec& weight,
                                             const OracleOptions& opts = {}) {
  if (window < 1) throw ArgumentError("window must be >= 1");
  weight.validate();
  CooccurrenceMatrix m(window, weight);
  m.restricted_ = opts.rows.has_value();
  const auto f = fixed_weights(weight, window);

  auto intern = [&](const std::string& w) -> std::size_t {
    if (auto it = m.index_.find(w); it != m.index_.end()) return it->second;
    std::size_t id = m.words_.size();
    m.words_.push_back(w);
    m.index_.emplace(w, id);
    if (!opts.rows || opts.rows->contains(w)) {
      if (m.rows_.size() >= opts.vocab_cap) {
        throw ResourceError("co-occurrence oracle exceeds vocabulary cap of " + std::to_string(opts.vocab_cap) +
                            " rows");
      }
      m.row_slot_.push_back(m.rows_.size());
      m.rows_.emplace_back();
    } else {
      m.row_slot_.push_back(CooccurrenceMatrix::kNoRow);
    }
    return id;
  };

  std::unordered_map<std::uint64_t, Fixed> acc;
  std::vector<std::size_t> ids;
  for (const auto& sentence : stream) {
    ids.clear();
    for (const auto& t : sentence) ids.push_back(intern(t));
    m.token_count_ += sentence.size();
    // Every ordered pair of distinct positions within the window.
    for (std::size_t p = 0; p < ids.size(); ++p) {
      if (!m.has_row(ids[p])) continue;
      for (std::size_t q = 0; q < ids.size(); ++q) {
        std::size_t d = p > q ? p - q : q - p;
        if (d == 0 || d > window) continue;
        acc[(static_cast<std::uint64_t>(ids[p]) << 32) | ids[q]] += f[d];
      }
    }
  }
  for (const auto& [key, value] : acc) {
    auto r = static_cast<std::size_t>(key >> 32);
    auto c = static_cast<std::uint32_t>(key & 0xffffffffu);
    m.rows_[m.row_slot_[r]].push_back({c, value});
  }
  for (auto& r : m.rows_) {
    std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.column < b.column; });
  }
  return m;
}

// vector[w][j] = sum over columns c with h(c) = j of xi(c) * entry(w, c).
template <TokenHasher Hasher>
EmbeddingTable project(const CooccurrenceMatrix& matrix, const Hasher& hasher, const HasherSpec& spec) {
  TrainParams params{matrix.window(), spec, matrix.weight_spec()};
  if (hasher.dimension() != spec.dimension) throw ArgumentError("hasher dimension does not match spec");
  EmbeddingTable table(params);
  table.add_token_count(matrix.token_count());

  std::vector<std::uint32_t> bucket(matrix.words().size());
  std::vector<int> sign(matrix.words().size());
  for (std::size_t c = 0; c < matrix.words().size(); ++c) {
    bucket[c] = static_cast<std::uint32_t>(hasher.index(matrix.words()[c]));
    sign[c] = hasher.sign(matrix.words()[c]);
  }
  for (std::size_t w = 0; w < matrix.words().size(); ++w) {
    if (!matrix.has_row(w)) continue;
    auto out = table.raw_row(table.insert(matrix.words()[w]));
    for (const auto& e : matrix.row(w)) {
      Fixed delta = sign[e.column] > 0 ? e.weight : -e.weight;
      if (__builtin_add_overflow(out[bucket[e.column]], delta, &out[bucket[e.column]])) {
        throw TrainingError("accumulator overflow in vector of '" + matrix.words()[w] + "'");
      }
    }
  }
  return table;
}

inline EmbeddingTable project(const CooccurrenceMatrix& matrix, const HasherSpec& spec) {
  return project(matrix, SeededHasher(spec), spec);
}

// ---------------------------------------------------------------------------
// Distortion

struct PairDistortion {
  std::string a;
  std::string b;
  double full_ip = 0;
  double hashed_ip = 0;
  double abs_err = 0;
  // abs_err / (|row_a| |row_b|): the error in units of the norms, which is
  // the quantity inner-product preserving sketches bound.
  double rel_err = 0;
  double full_cosine = 0;
  double hashed_cosine = 0;
};

struct DistortionReport {
  std::vector<PairDistortion> pairs;
  std::size_t skipped = 0;  // unknown word or zero row
  double median_rel_err = 0;
  double p90_rel_err = 0;
  double median_abs_err = 0;
  // Spearman between full and hashed pairwise cosines; NaN if undefined.
  double rank_spearman = 0;
};

namespace detail {
inline long double dense_dot(std::span<const Fixed> a, std::span<const Fixed> b) {
  long double s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    s += static_cast<long double>(to_double(a[j])) * to_double(b[j]);
  }
  return s;
}
}  // namespace detail

inline DistortionReport distortion(const CooccurrenceMatrix& matrix, const EmbeddingTable& table,
                                   std::span<const std::pair<std::string, std::string>> pairs) {
  DistortionReport report;
  std::vector<double> rel, abs, full_cos, hashed_cos;
  for (const auto& [a, b] : pairs) {
    auto ma = matrix.find(a);
    auto mb = matrix.find(b);
    auto ta = table.find(a);
    auto tb = table.find(b);
    if (!ma || !mb || !ta || !tb || !matrix.has_row(*ma) || !matrix.has_row(*mb)) {
      ++report.skipped;
      continue;
    }
    double na = std::sqrt(matrix.squared_norm(*ma));
    double nb = std::sqrt(matrix.squared_norm(*mb));
    auto va = table.raw_row(*ta);
    auto vb = table.raw_row(*tb);
    double ha = std::sqrt(static_cast<double>(detail::dense_dot(va, va)));
    double hb = std::sqrt(static_cast<double>(detail::dense_dot(vb, vb)));
    if (na == 0.0 || nb == 0.0 || ha == 0.0 || hb == 0.0) {
      ++report.skipped;
      continue;
    }
    PairDistortion d;
    d.a = a;
    d.b = b;
    d.full_ip = matrix.dot(*ma, *mb);
    d.hashed_ip = static_cast<double>(detail::dense_dot(va, vb));
    d.abs_err = std::fabs(d.hashed_ip - d.full_ip);
    d.rel_err = d.abs_err / (na * nb);
    d.full_cosine = d.full_ip / (na * nb);
    d.hashed_cosine = d.hashed_ip / (ha * hb);
    rel.push_back(d.rel_err);
    abs.push_back(d.abs_err);
    full_cos.push_back(d.full_cosine);
    hashed_cos.push_back(d.hashed_cosine);
    report.pairs.push_back(std::move(d));
  }
  if (!rel.empty()) {
    report.median_rel_err = quantile(rel, 0.5);
    report.p90_rel_err = quantile(rel, 0.9);
    report.median_abs_err = quantile(abs, 0.5);
  }
  try {
    report.rank_spearman = full_cos.size() >= 2 ? spearman(full_cos, hashed_cos) : std::nan("");
  } catch (const UndefinedError&) {
    report.rank_spearman = std::nan("");
  }
  return report;
}

// Uniform pairs of distinct words, reproducible for a seed.
inline std::vector<std::pair<std::string, std::string>> sample_pairs(const std::vector<std::string>& words,
                                                                     std::size_t count, std::uint64_t seed) {
  std::vector<std::pair<std::string, std::string>> out;
  if (words.size() < 2) return out;
  std::mt19937_64 rng(seed);
  out.reserve(count);
  while (out.size() < count) {
    std::size_t i = rng() % words.size();
    std::size_t j = rng() % words.size();
    if (i != j) out.emplace_back(words[i], words[j]);
  }
  return out;
}

// pair,full_ip,hashed_ip,abs_err,rel_err  (pair written as a|b)
inline void write_distortion_csv(std::ostream& out, const DistortionReport& report) {
  out << "pair,full_ip,hashed_ip,abs_err,rel_err\n";
  out.precision(17);
  for (const auto& p : report.pairs) {
    out << p.a << '|' << p.b << ',' << p.full_ip << ',' << p.hashed_ip << ',' << p.abs_err << ',' << p.rel_err
        << '\n';
  }
}

inline void write_distortion_summary(std::ostream& out, const DistortionReport& report) {
  out.precision(17);
  out << "pairs=" << report.pairs.size() << '\n'
      << "skipped=" << report.skipped << '\n'
      << "median_rel_err=" << report.median_rel_err << '\n'
      << "p90_rel_err=" << report.p90_rel_err << '\n'
      << "median_abs_err=" << report.median_abs_err << '\n'
      << "rank_spearman=" << report.rank_spearman << '\n';
}

}  // namespace hash2vec
