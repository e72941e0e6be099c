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

// Word-similarity benchmarks: dataset loading, rank correlation against human
// judgements, and the embedding-dimension sweep.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <fstream>
#include <future>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hash2vec/corpus.hpp"
#include "hash2vec/detail/utf8.hpp"
#include "hash2vec/embedder.hpp"
#include "hash2vec/embedding_io.hpp"
#include "hash2vec/embedding_table.hpp"
#include "hash2vec/errors.hpp"
#include "hash2vec/oracle.hpp"
#include "hash2vec/query.hpp"
#include "hash2vec/statistics.hpp"

namespace hash2vec {

struct ScoredPair {
  std::string a;
  std::string b;
  double human_score = 0;
};

struct SimilarityDataset {
  std::vector<ScoredPair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }

  std::unordered_set<std::string> words() const {
    std::unordered_set<std::string> out;
    for (const auto& p : pairs) {
      out.insert(p.a);
      out.insert(p.b);
    }
    return out;
  }
};

struct EvalReport {
  double spearman_rho = 0;
  std::size_t covered = 0;
  std::size_t skipped = 0;
};

// Delimiter (tab or comma) is taken from the first data line. '#' lines are
// comments. A first row whose score column is not numeric is a header.
inline SimilarityDataset load_dataset(std::istream& in) {
  SimilarityDataset ds;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t lineno = 0;
  char delim = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    if (delim == 0) delim = line.find('\t') != std::string::npos ? '\t' : ',';

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto pos = line.find(delim, start);
      std::string f = line.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
      auto fb = f.find_first_not_of(" \t");
      auto fe = f.find_last_not_of(" \t");
      fields.push_back(fb == std::string::npos ? "" : f.substr(fb, fe - fb + 1));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    const bool was_first = first_row;
    first_row = false;
    if (fields.size() < 3) throw ParseError("expected word, word, score", lineno);
    double score = 0;
    if (!detail::parse_number(std::string_view(fields[2]), score) || !std::isfinite(score)) {
      if (was_first) continue;  // header
      throw ParseError("bad score '" + fields[2] + "'", lineno);
    }
    if (fields[0].empty() || fields[1].empty()) throw ParseError("empty word", lineno);
    ScoredPair p{detail::lowercase(fields[0]), detail::lowercase(fields[1]), score};
    auto key = std::minmax(p.a, p.b);
    if (!seen.emplace(key.first, key.second).second) {
      throw ParseError("duplicate pair (" + p.a + ", " + p.b + ")", lineno);
    }
    ds.pairs.push_back(std::move(p));
  }
  if (in.bad()) throw IoError("failed reading dataset");
  if (ds.pairs.empty()) throw ParseError("dataset has no pairs", lineno);
  return ds;
}

inline SimilarityDataset load_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return load_dataset(in);
}

// Anything that can score a word pair; nullopt when the pair is not covered.
template <class M>
concept SimilarityModel = requires(const M& m, const std::string& w) {
  { m.similarity(w, w) } -> std::convertible_to<std::optional<double>>;
};

// Cosine between embedding rows, read straight from the table. Words with a
// zero vector count as uncovered.
class TableSimilarity {
 public:
  explicit TableSimilarity(const EmbeddingTable& table) : table_(table) {}
  std::optional<double> similarity(const std::string& a, const std::string& b) const {
    auto ra = table_.find(a);
    auto rb = table_.find(b);
    if (!ra || !rb) return std::nullopt;
    try {
      return cosine(table_.row(*ra), table_.row(*rb));
    } catch (const UndefinedError&) {
      return std::nullopt;
    }
  }

 private:
  const EmbeddingTable& table_;
};

// Cosine between exact co-occurrence rows.
class MatrixSimilarity {
 public:
  explicit MatrixSimilarity(const CooccurrenceMatrix& m) : m_(m) {}
  std::optional<double> similarity(const std::string& a, const std::string& b) const {
    auto ia = m_.find(a);
    auto ib = m_.find(b);
    if (!ia || !ib || !m_.has_row(*ia) || !m_.has_row(*ib)) return std::nullopt;
    double na = m_.squared_norm(*ia);
    double nb = m_.squared_norm(*ib);
    if (na == 0 || nb == 0) return std::nullopt;
    return m_.dot(*ia, *ib) / std::sqrt(na * nb);
  }

 private:
  const CooccurrenceMatrix& m_;
};

template <SimilarityModel M>
EvalReport evaluate_model(const M& model, const SimilarityDataset& dataset) {
  std::vector<double> model_scores, human_scores;
  EvalReport report;
  for (const auto& p : dataset.pairs) {
    auto s = model.similarity(p.a, p.b);
    if (!s) {
      ++report.skipped;
      continue;
    }
    model_scores.push_back(*s);
    human_scores.push_back(p.human_score);
  }
  report.covered = model_scores.size();
  if (report.covered < 2) {
    throw EvaluationError("only " + std::to_string(report.covered) + " dataset pairs are covered by the vocabulary");
  }
  report.spearman_rho = spearman(model_scores, human_scores);
  return report;
}

inline EvalReport evaluate(const EmbeddingTable& table, const SimilarityDataset& dataset) {
  return evaluate_model(TableSimilarity(table), dataset);
}

// ---------------------------------------------------------------------------
// Dimension sweep

struct SweepPoint {
  std::size_t n = 0;
  double rho = 0;
  double rho_oracle = 0;
  std::size_t covered = 0;
  std::size_t skipped = 0;
};

// Full-matrix reference: cosine over exact co-occurrence rows of the dataset words.
inline EvalReport evaluate_oracle(const TokenStream& stream, const TrainParams& params,
                                  const SimilarityDataset& dataset) {
  OracleOptions opts;
  opts.rows = dataset.words();
  auto matrix = build_cooccurrence(stream, params.window, params.weight, opts);
  return evaluate_model(MatrixSimilarity(matrix), dataset);
}

// One table per dimension, all other parameters fixed. Up to `threads` points
// train at once; each holds a vocab x n table, so memory scales with it.
inline std::vector<SweepPoint> sweep_dimensions(const TokenStream& stream, const TrainParams& base,
                                                const std::vector<std::size_t>& dims,
                                                const SimilarityDataset& dataset, std::size_t threads = 1) {
  if (dims.empty()) throw ArgumentError("sweep needs at least one dimension");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1) throw ArgumentError("sweep dimensions must be >= 1");
    if (i > 0 && dims[i] <= dims[i - 1]) throw ArgumentError("sweep dimensions must be strictly ascending");
  }
  threads = std::max<std::size_t>(threads, 1);
  auto point = [&](std::size_t n) {
    TrainParams p = base;
    p.hasher.dimension = n;
    return evaluate(train(stream, p), dataset);
  };
  const EvalReport ref = evaluate_oracle(stream, base, dataset);
  std::vector<SweepPoint> curve;
  for (std::size_t i = 0; i < dims.size(); i += threads) {
    std::vector<std::future<EvalReport>> batch;
    for (std::size_t j = i; j < std::min(dims.size(), i + threads); ++j) {
      batch.push_back(std::async(std::launch::async, point, dims[j]));
    }
    for (std::size_t j = 0; j < batch.size(); ++j) {
      EvalReport r = batch[j].get();
      curve.push_back({dims[i + j], r.spearman_rho, ref.spearman_rho, r.covered, r.skipped});
    }
  }
  return curve;
}

inline void write_curve_csv(std::ostream& out, const std::vector<SweepPoint>& curve) {
  out << "n,rho,rho_oracle,covered,skipped\n";
  out.precision(17);
  for (const auto& p : curve) {
    out << p.n << ',' << p.rho << ',' << p.rho_oracle << ',' << p.covered << ',' << p.skipped << '\n';
  }
}

}  // namespace hash2vec
