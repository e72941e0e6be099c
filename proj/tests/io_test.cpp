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
#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "hash2vec/embedder.hpp"
#include "hash2vec/embedding_io.hpp"
#include "support.hpp"

using namespace hash2vec;

namespace {
std::string dump(const EmbeddingTable& t, ExportOptions opts = {}) {
  std::ostringstream out;
  write_embeddings(out, t, opts);
  return out.str();
}

EmbeddingTable parse(const std::string& s) {
  std::istringstream in(s);
  return read_embeddings(in);
}

std::size_t parse_error_line(const std::string& s) {
  try {
    parse(s);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}
}  // namespace

TEST(EmbeddingFile, RoundTripIsExact) {
  std::mt19937_64 rng(31);
  for (auto p : {make_params(17, 3, 5), make_params(64, 15, 1)}) {
    auto t = train(h2v_test::random_stream(rng, 2000, 100), p);
    auto back = parse(dump(t));
    EXPECT_EQ(back, t);
    EXPECT_EQ(back.params(), t.params());
    EXPECT_EQ(back.token_count(), t.token_count());
    EXPECT_EQ(dump(back), dump(t));
  }
  TrainParams c{4, HasherSpec{8, 2, 3}, WeightSpec::constant()};
  auto t = train({{"x", "y", "z"}}, c);
  EXPECT_EQ(parse(dump(t)), t);
}

TEST(EmbeddingFile, HeaderCarriesParameters) {
  auto t = train({{"b", "a"}}, make_params(3, 2, 9));
  std::string text = dump(t);
  EXPECT_EQ(text.substr(0, text.find('\n')), "hash2vec 3 2 gaussian 1e+00 9 " +
                                                 std::to_string(derive_sign_seed(9)) + " 2 2");
  // Rows sorted by word.
  EXPECT_EQ(text[text.find('\n') + 1], 'a');
}

TEST(EmbeddingFile, EmptyTableIsHeaderOnly) {
  EmbeddingTable t(make_params(4, 2));
  std::string text = dump(t);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_EQ(parse(text), t);
}

TEST(EmbeddingFile, EightFieldHeaderAccepted) {
  auto t = parse("hash2vec 2 1 constant 0e+00 1 2 1\nw 1e+00 -2.5e-01\n");
  EXPECT_EQ(t.vector("w"), (std::vector<double>{1.0, -0.25}));
  EXPECT_EQ(t.params().weight.kind, WeightKind::constant);
}

TEST(EmbeddingFile, MalformedInputReportsLine) {
  const std::string h = "hash2vec 2 1 constant 0e+00 1 2 2\n";
  EXPECT_EQ(parse_error_line(""), 1u);
  EXPECT_EQ(parse_error_line("word2vec 2 1\n"), 1u);
  EXPECT_EQ(parse_error_line("hash2vec 2 1 triangle 0e+00 1 2 0\n"), 1u);
  EXPECT_EQ(parse_error_line("hash2vec 2 1 constant 0e+00 1 1 0\n"), 1u);  // equal seeds
  EXPECT_EQ(parse_error_line("hash2vec x 1 constant 0e+00 1 2 0\n"), 1u);
  EXPECT_EQ(parse_error_line(h + "a 1 2\nb 1\n"), 3u);           // component count
  EXPECT_EQ(parse_error_line(h + "a 1 2\nb 1 2 3\n"), 3u);
  EXPECT_EQ(parse_error_line(h + "a 1 2\na 1 2\n"), 3u);         // duplicate word
  EXPECT_EQ(parse_error_line(h + "a 1 x\nb 1 2\n"), 2u);         // bad number
  EXPECT_EQ(parse_error_line(h + "a 1 nan\nb 1 2\n"), 2u);
  EXPECT_NE(parse_error_line(h + "a 1 2\n"), 0u);                // vocab count
}

TEST(EmbeddingFile, Float32ExportIsLossyButReadable) {
  auto t = train({{"a", "b", "c", "a"}}, make_params(4, 3));
  auto back = parse(dump(t, {true}));
  for (const auto& w : t.words()) {
    auto x = t.vector(w), y = back.vector(w);
    for (std::size_t j = 0; j < x.size(); ++j) EXPECT_NEAR(x[j], y[j], 1e-6);
  }
}

TEST(EmbeddingFile, MissingFileIsIoError) { EXPECT_THROW(load_embeddings("/nonexistent/x.vec"), IoError); }

TEST(Export, Word2VecAndTsv) {
  auto t = train({{"b", "a"}}, TrainParams{1, HasherSpec{2, 1, 2}, WeightSpec::constant()});
  std::ostringstream w2v, vec, meta;
  write_word2vec_text(w2v, t);
  write_tsv(vec, meta, t);
  EXPECT_EQ(w2v.str().substr(0, 4), "2 2\n");
  EXPECT_EQ(meta.str(), "a\nb\n");
  const std::string rows = vec.str();
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\t'), 2);
}
