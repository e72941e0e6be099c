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

// Text embedding files.
//
//   hash2vec <n> <k> <weight-kind> <sigma> <seed> <sign_seed> <vocab_size> [<token_count>]
//   <word> <c1> ... <cn>
//   ...
//
// Components use the shortest scientific notation that round-trips the
// double, so import(export(T)) == T. Rows are sorted by word (byte order).

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hash2vec/embedding_table.hpp"
#include "hash2vec/errors.hpp"

namespace hash2vec {

struct ExportOptions {
  bool float32 = false;  // lossy downcast of components
};

namespace detail {

inline void append_number(std::string& out, double value, bool float32) {
  char buf[64];
  std::to_chars_result res = float32
      ? std::to_chars(buf, buf + sizeof(buf), static_cast<float>(value), std::chars_format::scientific)
      : std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific);
  out.append(buf, res.ptr);
}

inline std::vector<std::size_t> sorted_rows(const EmbeddingTable& table) {
  std::vector<std::size_t> order(table.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return table.word(a) < table.word(b); });
  return order;
}

inline std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace detail

inline void write_embeddings(std::ostream& out, const EmbeddingTable& table, const ExportOptions& opts = {}) {
  const auto& p = table.params();
  std::string line = "hash2vec " + std::to_string(p.dimension()) + ' ' + std::to_string(p.window) + ' ' +
                     to_string(p.weight.kind) + ' ';
  detail::append_number(line, p.weight.kind == WeightKind::gaussian ? p.weight.sigma : 0.0, false);
  line += ' ' + std::to_string(p.hasher.seed) + ' ' + std::to_string(p.hasher.sign_seed) + ' ' +
          std::to_string(table.size()) + ' ' + std::to_string(table.token_count()) + '\n';
  out << line;
  for (std::size_t r : detail::sorted_rows(table)) {
    line = table.word(r);
    for (Fixed v : table.raw_row(r)) {
      line.push_back(' ');
      detail::append_number(line, to_double(v), opts.float32);
    }
    line.push_back('\n');
    out << line;
  }
  if (!out) throw IoError("failed writing embeddings");
}

inline EmbeddingTable read_embeddings(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  auto h = detail::split_spaces(line);
  if ((h.size() != 8 && h.size() != 9) || h[0] != "hash2vec") {
    throw ParseError("expected 'hash2vec <n> <k> <weight-kind> <sigma> <seed> <sign_seed> <vocab_size>'", 1);
  }
  TrainParams params;
  std::size_t vocab = 0;
  std::uint64_t tokens = 0;
  double sigma = 0;
  bool ok = detail::parse_number(h[1], params.hasher.dimension) && detail::parse_number(h[2], params.window) &&
            detail::parse_number(h[4], sigma) && detail::parse_number(h[5], params.hasher.seed) &&
            detail::parse_number(h[6], params.hasher.sign_seed) && detail::parse_number(h[7], vocab) &&
            (h.size() == 8 || detail::parse_number(h[8], tokens));
  if (!ok) throw ParseError("malformed header field", 1);
  try {
    params.weight.kind = parse_weight_kind(h[3]);
    params.weight.sigma = params.weight.kind == WeightKind::gaussian ? sigma : 0.0;
    params.validate();
  } catch (const ArgumentError& e) {
    throw ParseError(e.what(), 1);
  }

  EmbeddingTable table(params);
  table.reserve(vocab);
  table.add_token_count(tokens);
  const std::size_t n = params.dimension();
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = detail::split_spaces(line);
    if (fields.empty()) continue;
    if (fields.size() != n + 1) {
      throw ParseError("expected " + std::to_string(n) + " components, found " + std::to_string(fields.size() - 1),
                       lineno);
    }
    if (table.contains(fields[0])) throw ParseError("duplicate word '" + std::string(fields[0]) + "'", lineno);
    auto row = table.raw_row(table.insert(fields[0]));
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0;
      if (!detail::parse_number(fields[j + 1], v) || !std::isfinite(v)) {
        throw ParseError("bad component '" + std::string(fields[j + 1]) + "'", lineno);
      }
      try {
        row[j] = to_fixed(v);
      } catch (const ArgumentError& e) {
        throw ParseError(e.what(), lineno);
      }
    }
  }
  if (in.bad()) throw IoError("failed reading embeddings");
  if (table.size() != vocab) {
    throw ParseError("header declares " + std::to_string(vocab) + " words, file has " + std::to_string(table.size()),
                     lineno);
  }
  return table;
}

inline void save_embeddings(const std::string& path, const EmbeddingTable& table, const ExportOptions& opts = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_embeddings(out, table, opts);
}

inline EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_embeddings(in);
}

// word2vec text format: "<vocab> <n>" header, then rows.
inline void write_word2vec_text(std::ostream& out, const EmbeddingTable& table, const ExportOptions& opts = {}) {
  out << table.size() << ' ' << table.dimension() << '\n';
  std::string line;
  for (std::size_t r : detail::sorted_rows(table)) {
    line = table.word(r);
    for (Fixed v : table.raw_row(r)) {
      line.push_back(' ');
      detail::append_number(line, to_double(v), opts.float32);
    }
    line.push_back('\n');
    out << line;
  }
}

// Tab-separated vectors plus a parallel one-word-per-line metadata file, the
// layout taken by common t-SNE / projector front ends.
inline void write_tsv(std::ostream& vectors, std::ostream& metadata, const EmbeddingTable& table,
                      const ExportOptions& opts = {}) {
  std::string line;
  for (std::size_t r : detail::sorted_rows(table)) {
    line.clear();
    bool first = true;
    for (Fixed v : table.raw_row(r)) {
      if (!first) line.push_back('\t');
      first = false;
      detail::append_number(line, to_double(v), opts.float32);
    }
    line.push_back('\n');
    vectors << line;
    metadata << table.word(r) << '\n';
  }
}

}  // namespace hash2vec
