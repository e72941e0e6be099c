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
// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Corpus-scale checks run on the bundled desk corpus.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hash2vec/hash2vec.hpp"
#include "support.hpp"

using namespace hash2vec;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances.
constexpr int kEquivalenceCorpora = 100;
constexpr std::size_t kEquivalenceMaxTokens = 5000;
constexpr double kEquivalenceBudgetSeconds = 60.0;
constexpr std::size_t kDistortionVocab = 2000;
constexpr std::size_t kDistortionPairs = 2000;
constexpr int kDistortionSeeds = 5;
constexpr double kRankCorrelationAt4096 = 0.9;
constexpr int kSweepSeeds = 3;
constexpr double kSweepNoiseBand = 0.02;
constexpr double kSweepOracleGap = 0.05;
constexpr std::size_t kSweepVocab = 20000;
constexpr std::size_t kSweepWindow = 5;
constexpr double kLinearLow = 1.6;
constexpr double kLinearHigh = 2.5;
constexpr int kTimingRuns = 3;
constexpr int kProbesNeeded = 2;
constexpr double kSpearmanTolerance = 1e-12;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, x);
  return buf;
}

std::string bytes_of(const EmbeddingTable& t) {
  std::ostringstream out;
  write_embeddings(out, t);
  return out.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Corpus {
 public:
  const TokenStream& raw() {
    if (!raw_) {
      std::cerr << "loading " << HASH2VEC_DESK_CORPUS << '\n';
      raw_ = read_token_stream(HASH2VEC_DESK_CORPUS);
      std::cerr << "  " << raw_->size() << " sentences, " << raw_->token_count() << " tokens\n";
    }
    return *raw_;
  }

  // Stoplist applied, then the most frequent max_vocab words kept (0 = all).
  TokenStream filtered(std::size_t max_vocab) {
    PreprocessConfig cfg;
    FilterConfig f;
    f.stoplist = read_stoplist(h2v_test::data_path("stoplist_en.txt"));
    if (max_vocab) f.max_vocab = max_vocab;
    cfg.filter = std::move(f);
    return preprocess(raw(), cfg);
  }

 private:
  std::optional<TokenStream> raw_;
};

Outcome streaming_batch_equivalence() {
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<std::size_t> tokens(1, kEquivalenceMaxTokens), vocab(1, 400), n(1, 512), k(1, 15);
  std::uniform_int_distribution<std::uint32_t> seed;
  auto t0 = Clock::now();
  int equal = 0;
  for (int i = 0; i < kEquivalenceCorpora; ++i) {
    auto stream = h2v_test::random_stream(rng, tokens(rng), vocab(rng));
    TrainParams p = make_params(n(rng), k(rng), seed(rng));
    switch (rng() % 3) {
      case 0: p.weight = WeightSpec::constant(); break;
      case 1: p.weight = WeightSpec::gaussian(0.25 + static_cast<double>(rng() % 200) / 20.0); break;
      default: break;
    }
    auto m = build_cooccurrence(stream, p.window, p.weight);
    equal += train(stream, p) == project(m, p.hasher);
  }
  double secs = seconds_since(t0);
  return {equal == kEquivalenceCorpora && secs < kEquivalenceBudgetSeconds,
          std::to_string(equal) + "/" + std::to_string(kEquivalenceCorpora) + " identical in " + fmt(secs, 1) + "s"};
}

Outcome lossless_limit() {
  std::vector<TokenStream> corpora;
  corpora.push_back(read_token_stream(h2v_test::data_path("tiny_corpus.txt")));
  std::mt19937_64 rng(7);
  corpora.push_back(h2v_test::random_stream(rng, 20000, 500));
  std::size_t rows = 0, mismatches = 0;
  for (const auto& stream : corpora) {
    for (std::size_t k : {1u, 5u}) {
      auto m = build_cooccurrence(stream, k, WeightSpec::constant());
      VocabularyHasher h(m.words());
      TrainParams p{k, HasherSpec{h.dimension(), 1, 2}, WeightSpec::constant()};
      auto t = train(stream, p, h);
      for (std::size_t w = 0; w < m.words().size(); ++w) {
        auto row = t.raw_row(*t.find(m.words()[w]));
        std::vector<Fixed> expected(row.size(), 0);
        for (const auto& e : m.row(w)) expected[h.index(m.words()[e.column])] = e.weight;
        mismatches += !std::equal(row.begin(), row.end(), expected.begin());
        ++rows;
      }
    }
  }
  return {mismatches == 0, std::to_string(rows - mismatches) + "/" + std::to_string(rows) + " rows equal"};
}

Outcome merge_exactness() {
  auto stream = read_token_stream(h2v_test::data_path("tiny_corpus.txt"));
  auto p = make_params(300, 5, 3);
  const std::string whole = bytes_of(train(stream, p));
  int ok = 0;
  for (std::size_t shards = 1; shards <= 8; ++shards) {
    std::vector<EmbeddingTable> parts;
    for (auto [lo, hi] : shard_ranges(stream.size(), shards)) {
      TokenStream part;
      for (std::size_t s = lo; s < hi; ++s) part.push_back(stream[s]);
      parts.push_back(part.empty() ? EmbeddingTable(p) : train(part, p));
    }
    bool same = bytes_of(merge(parts)) == whole && bytes_of(train_sharded(stream, p, shards)) == whole;
    ok += same;
  }
  return {ok == 8, std::to_string(ok) + "/8 shard counts bit-identical"};
}

Outcome determinism() {
  auto stream = read_token_stream(h2v_test::data_path("tiny_corpus.txt"));
  auto a = bytes_of(train(stream, make_params(128, 5, 11)));
  auto b = bytes_of(train(stream, make_params(128, 5, 11)));
  auto t1 = train(stream, make_params(128, 5, 11));
  auto t2 = train(stream, make_params(128, 5, 12));
  std::size_t changed = 0;
  for (const auto& w : t1.words()) {
    auto x = t1.raw_row(*t1.find(w));
    auto y = t2.raw_row(*t2.find(w));
    changed += !std::equal(x.begin(), x.end(), y.begin());
  }
  return {a == b && changed > 0,
          std::string(a == b ? "byte-identical reruns" : "reruns differ") + ", seed change alters " +
              std::to_string(changed) + "/" + std::to_string(t1.size()) + " vectors"};
}

Outcome inner_product_trend(Corpus& corpus) {
  const std::vector<std::size_t> dims{64, 256, 1024, 4096};
  auto stream = corpus.filtered(kDistortionVocab);
  auto freqs = count_frequencies(stream);
  std::vector<std::string> vocab;
  for (const auto& [w, c] : freqs.counts) vocab.push_back(w);
  std::sort(vocab.begin(), vocab.end());
  auto pairs = sample_pairs(vocab, kDistortionPairs, 1);
  auto m = build_cooccurrence(stream, kSweepWindow, WeightSpec::gaussian_for_window(kSweepWindow));

  std::vector<double> rel(dims.size(), 0), rank(dims.size(), 0);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    for (int s = 1; s <= kDistortionSeeds; ++s) {
      auto r = distortion(m, train(stream, make_params(dims[i], kSweepWindow, static_cast<std::uint32_t>(s))), pairs);
      rel[i] += r.median_rel_err / kDistortionSeeds;
      rank[i] += r.rank_spearman / kDistortionSeeds;
    }
  }
  bool monotone = true;
  std::string detail = "vocab " + std::to_string(vocab.size()) + ";";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i > 0) monotone = monotone && rel[i] < rel[i - 1] && rank[i] > rank[i - 1];
    detail += " n=" + std::to_string(dims[i]) + " rel=" + fmt(rel[i]) + " rank=" + fmt(rank[i]);
  }
  return {monotone && rank.back() >= kRankCorrelationAt4096, detail};
}

Outcome similarity_trend(Corpus& corpus) {
  const std::vector<std::size_t> dims{64, 128, 256, 512, 1024, 2048, 4096};
  auto stream = corpus.filtered(kSweepVocab);
  auto ds = load_dataset_file(h2v_test::data_path("wordsim353.tsv"));
  std::vector<double> rho(dims.size(), 0);
  double oracle = 0;
  std::size_t covered = 0;
  for (int s = 1; s <= kSweepSeeds; ++s) {
    auto curve = sweep_dimensions(stream, make_params(dims.front(), kSweepWindow, static_cast<std::uint32_t>(s)),
                                  dims, ds);
    for (std::size_t i = 0; i < dims.size(); ++i) rho[i] += curve[i].rho / kSweepSeeds;
    oracle = curve.back().rho_oracle;
    covered = curve.back().covered;
  }
  bool trend = true;
  std::string detail = "covered " + std::to_string(covered) + "/" + std::to_string(ds.size()) + ";";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i > 0) trend = trend && rho[i] >= rho[i - 1] - kSweepNoiseBand;
    detail += " " + std::to_string(dims[i]) + ":" + fmt(rho[i]);
  }
  const double gap = std::fabs(oracle - rho.back());
  detail += "; oracle " + fmt(oracle) + ", gap " + fmt(gap);
  return {trend && gap <= kSweepOracleGap, detail};
}

Outcome linear_time(Corpus& corpus) {
  const TokenStream& once = corpus.raw();
  TokenStream twice = once;
  for (const auto& s : once) twice.push_back(s);
  // Table allocation is a per-run cost proportional to vocab x n, not to
  // corpus length; a small n keeps it from masking the per-token term.
  auto p = make_params(64, 5);
  auto best = [&](const TokenStream& s) {
    double t = 1e300;
    for (int i = 0; i < kTimingRuns; ++i) {
      auto t0 = Clock::now();
      auto table = train(s, p);
      t = std::min(t, seconds_since(t0));
      if (table.empty()) return 0.0;
    }
    return t;
  };
  double a = best(once);
  double b = best(twice);
  double ratio = b / a;
  return {ratio >= kLinearLow && ratio <= kLinearHigh,
          std::to_string(once.token_count()) + " tokens " + fmt(a, 3) + "s, doubled " + fmt(b, 3) + "s, ratio " +
              fmt(ratio, 3)};
}

Outcome neighbor_sanity(Corpus& corpus) {
  const std::vector<std::pair<std::string, std::set<std::string>>> probes{
      {"computer", {"computers", "software", "systems", "hardware", "game", "program", "programs"}},
      {"physics", {"chemistry", "mechanics", "quantum", "mathematics", "particle", "study", "theory", "astronomy"}},
      {"italy", {"germany", "france", "italian", "greece", "spain", "switzerland", "russia"}},
      {"king", {"son", "i", "emperor", "ii", "kings", "england", "iii", "henry", "charles", "james"}},
  };
  auto table = train(corpus.filtered(0), make_params(600, 15));
  QueryIndex index(table);
  int hits = 0;
  std::string detail;
  for (const auto& [word, expected] : probes) {
    std::string got;
    bool hit = false;
    try {
      for (const auto& nb : index.nearest(word, 5)) {
        got += (got.empty() ? "" : ",") + nb.word;
        hit = hit || expected.contains(nb.word);
      }
    } catch (const Error& e) {
      got = e.what();
    }
    hits += hit;
    detail += (detail.empty() ? "" : "; ") + word + (hit ? "+" : "-") + " [" + got + "]";
  }
  return {hits >= kProbesNeeded, std::to_string(hits) + "/4 probes hit: " + detail};
}

Outcome analogy_mechanics(Corpus& corpus) {
  // Exact maximizer: w = x + y - z.
  EmbeddingTable t(make_params(3, 1));
  auto put = [&](const std::string& w, std::vector<double> v) {
    auto r = t.raw_row(t.insert(w));
    for (std::size_t j = 0; j < v.size(); ++j) r[j] = to_fixed(v[j]);
  };
  put("x", {1, 0, 0});
  put("y", {0, 1, 0});
  put("z", {0, 0, 1});
  put("w", {1, 1, -1});
  bool maximizer = true;
  for (auto mode : {AnalogyMode::cosine, AnalogyMode::additive, AnalogyMode::raw_dot}) {
    auto r = analogy(t, "x", "y", "z", 1, mode);
    maximizer = maximizer && !r.empty() && r[0].word == "w";
  }

  // Cancellation: z shares x's vector, so the ranking is nearest-to-y.
  std::mt19937_64 rng(9);
  auto base = train(h2v_test::random_stream(rng, 20000, 300), make_params(64, 5));
  EmbeddingTable u(base.params());
  for (std::size_t r = 0; r < base.size(); ++r) {
    auto src = base.raw_row(base.word(r) == "w9" ? *base.find("w4") : r);
    auto dst = u.raw_row(u.insert(base.word(r)));
    std::copy(src.begin(), src.end(), dst.begin());
  }
  auto got = analogy(u, "w4", "w7", "w9", 50);
  std::vector<Neighbor> want;
  for (const auto& nb : nearest(u, "w7", 53)) {
    if (nb.word != "w4" && nb.word != "w9" && want.size() < 50) want.push_back(nb);
  }
  bool cancellation = got.size() == want.size();
  for (std::size_t i = 0; cancellation && i < got.size(); ++i) {
    cancellation = got[i].word == want[i].word && std::fabs(got[i].score - want[i].score) <= 1e-12;
  }

  // Corpus rows, informational.
  auto table = train(corpus.filtered(0), make_params(600, 5));
  QueryIndex index(table);
  const std::vector<std::array<std::string, 4>> rows{
      {"paris", "france", "moscow", "russia"},
      {"cow", "milk", "pig", "meat"},
      {"glass", "glasses", "horse", "horses"},
      {"nice", "ugly", "small", "large"},
  };
  std::string report;
  for (const auto& [x, y, z, expect] : rows) {
    auto top = [&](const std::string& a, const std::string& b, const std::string& c) {
      std::string s;
      try {
        for (const auto& nb : index.analogy(a, b, c, 5)) s += (s.empty() ? "" : ",") + nb.word;
      } catch (const Error& e) {
        s = e.what();
      }
      return s;
    };
    std::string literal = top(x, y, z);
    std::string classic = top(y, z, x);
    auto found = [&](const std::string& s) { return ("," + s + ",").find("," + expect + ",") != std::string::npos; };
    report += "\n    " + x + ":" + y + "::" + z + ":? want " + expect + " | x+y-z [" + literal + "]" +
              (found(literal) ? " found" : "") + " | y-x+z [" + classic + "]" + (found(classic) ? " found" : "");
  }
  return {maximizer && cancellation,
          std::string("exact maximizer ") + (maximizer ? "ok" : "FAILED") + ", cancellation " +
              (cancellation ? "ok" : "FAILED") + report};
}

Outcome spearman_examples() {
  std::vector<double> up{1, 2, 3, 4, 5}, up10{10, 20, 30, 40, 50}, down{5, 4, 3, 2, 1};
  std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 4};
  double a = spearman(up, up10), b = spearman(up, down), c = spearman(x, y);
  bool ok = std::fabs(a - 1.0) <= kSpearmanTolerance && std::fabs(b + 1.0) <= kSpearmanTolerance &&
            std::fabs(c - 0.8) <= kSpearmanTolerance;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g", a, b, c);
  return {ok, buf};
}

}  // namespace

int main() {
  Corpus corpus;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 streaming/batch equivalence", streaming_batch_equivalence},
      {"2 lossless limit", lossless_limit},
      {"3 merge exactness", merge_exactness},
      {"4 determinism", determinism},
      {"5 inner-product preservation trend", [&] { return inner_product_trend(corpus); }},
      {"6 similarity vs dimension trend", [&] { return similarity_trend(corpus); }},
      {"7 linear time", [&] { return linear_time(corpus); }},
      {"8 neighbor sanity", [&] { return neighbor_sanity(corpus); }},
      {"9 analogy mechanics", [&] { return analogy_mechanics(corpus); }},
      {"10 spearman unit examples", spearman_examples},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << fmt(seconds_since(t0), 1) << "s): " << o.detail
              << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
