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
//
// Exit status: 0 ok, 1 usage error, 2 I/O error, 3 domain error.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hash2vec/hash2vec.hpp"

namespace {

using namespace hash2vec;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Output goes to the named file, or stdout when the name is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw IoError("cannot open " + path + " for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    stream().flush();
    if (!stream()) throw IoError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct ModelFlags {
  std::size_t k = 5;
  double sigma = 0;
  std::string weight = "gaussian";
  std::uint32_t seed = kDefaultSeed;
  std::uint32_t sign_seed = 0;
  CLI::Option* sigma_opt = nullptr;
  CLI::Option* sign_seed_opt = nullptr;

  void add(CLI::App* app) {
    app->add_option("--k", k, "Context size on each side")->capture_default_str()->check(CLI::PositiveNumber);
    sigma_opt = app->add_option("--sigma", sigma, "Gaussian width (default k/2)")->check(CLI::PositiveNumber);
    app->add_option("--weight", weight, "Distance weighting")
        ->capture_default_str()
        ->check(CLI::IsMember({"constant", "gaussian"}));
    app->add_option("--seed", seed, "Bucket hash seed")->capture_default_str()->envname("HASH2VEC_SEED");
    sign_seed_opt = app->add_option("--sign-seed", sign_seed, "Sign hash seed (default derived from --seed)");
  }

  TrainParams params(std::size_t n) const {
    TrainParams p;
    p.window = k;
    p.hasher = HasherSpec{n, seed, *sign_seed_opt ? sign_seed : derive_sign_seed(seed)};
    if (weight == "constant") {
      p.weight = WeightSpec::constant();
    } else {
      p.weight = *sigma_opt ? WeightSpec::gaussian(sigma) : WeightSpec::gaussian_for_window(k);
    }
    p.validate();
    return p;
  }
};

void log_params(const TrainParams& p) {
  std::cerr << "hash2vec: n=" << p.dimension() << " k=" << p.window << " weight=" << to_string(p.weight.kind)
            << " sigma=" << p.weight.sigma << " seed=" << p.hasher.seed << " sign_seed=" << p.hasher.sign_seed << '\n';
}

struct PrepFlags {
  std::string stoplist;
  double percentile = 1.0;
  std::size_t max_vocab = 0;
  bool phrases = false;
  double phrase_threshold = PhraseConfig{}.threshold;
  double phrase_discount = PhraseConfig{}.discount;
  int phrase_passes = PhraseConfig{}.passes;
  double sample_prob = 1.0;
  std::uint64_t sample_seed = 0;
  CLI::Option* percentile_opt = nullptr;
  CLI::Option* max_vocab_opt = nullptr;
  CLI::Option* sample_opt = nullptr;
  CLI::Option* sample_seed_opt = nullptr;

  void add(CLI::App* app) {
    app->add_option("--stoplist", stoplist, "File of words to drop, one per line");
    percentile_opt = app->add_option("--percentile", percentile, "Drop tokens above this share of token mass")
                         ->check(CLI::Range(0.0, 1.0));
    max_vocab_opt = app->add_option("--max-vocab", max_vocab, "Keep only the most frequent words")
                        ->check(CLI::PositiveNumber);
    app->add_flag("--phrases", phrases, "Join frequent bigrams into phrase tokens");
    app->add_option("--phrase-threshold", phrase_threshold)->capture_default_str();
    app->add_option("--phrase-discount", phrase_discount)->capture_default_str();
    app->add_option("--phrase-passes", phrase_passes)->capture_default_str();
    sample_opt = app->add_option("--sample-prob", sample_prob, "Keep each sentence with this probability")
                     ->check(CLI::Range(0.0, 1.0));
    sample_seed_opt = app->add_option("--sample-seed", sample_seed, "Sampler seed (default --seed)");
  }

  bool active() const {
    return !stoplist.empty() || *percentile_opt || *max_vocab_opt || phrases || *sample_opt;
  }

  PreprocessConfig config(std::uint64_t default_seed) const {
    PreprocessConfig cfg;
    if (!stoplist.empty() || *percentile_opt || *max_vocab_opt) {
      FilterConfig f;
      if (!stoplist.empty()) f.stoplist = read_stoplist(stoplist);
      if (*percentile_opt) f.percentile = percentile;
      if (*max_vocab_opt) f.max_vocab = max_vocab;
      cfg.filter = std::move(f);
    }
    if (phrases) cfg.phrases = PhraseConfig{phrase_discount, phrase_threshold, phrase_passes};
    if (*sample_opt) {
      std::uint64_t s = *sample_seed_opt ? sample_seed : default_seed;
      std::cerr << "hash2vec: sample_prob=" << sample_prob << " sample_seed=" << s << '\n';
      cfg.sampler = SamplerConfig{sample_prob, s};
    }
    return cfg;
  }
};

// Streams the corpus at `path` through the configured preprocessing, calling
// sink(Sentence&) for every surviving sentence. The file is read once per
// preprocessing pass and once more for the output.
void stream_corpus(const std::string& path, const PrepFlags& prep, std::uint64_t seed,
                   const std::function<void(Sentence&)>& sink) {
  if (!prep.active()) {
    tokenize_file(path, [&](Sentence&& s) { sink(s); });
    return;
  }
  auto source = [&](auto&& inner) { tokenize_file(path, inner); };
  Preprocessor p = Preprocessor::prepare(source, prep.config(seed));
  tokenize_file(path, [&](Sentence&& s) {
    if (p.apply(s)) sink(s);
  });
}

TokenStream load_corpus(const std::string& path, const PrepFlags& prep, std::uint64_t seed) {
  TokenStream out;
  stream_corpus(path, prep, seed, [&](Sentence& s) { out.push_back(std::move(s)); });
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands

struct PreprocessCmd {
  std::string input, output;
  ModelFlags model;
  PrepFlags prep;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("preprocess", "Tokenize, filter, join phrases and sample; one sentence per line");
    c->add_option("input", input, "Corpus text file")->required();
    c->add_option("-o,--output", output, "Output file (default stdout)");
    c->add_option("--seed", model.seed, "Default sampler seed")->envname("HASH2VEC_SEED");
    prep.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    Output out(output);
    std::string line;
    stream_corpus(input, prep, model.seed, [&](Sentence& s) {
      line.clear();
      for (const auto& t : s) {
        if (!line.empty()) line.push_back(' ');
        line += t;
      }
      line.push_back('\n');
      out.stream() << line;
    });
    out.close();
  }
};

struct TrainCmd {
  std::string input, output;
  std::size_t n = 600;
  std::size_t shards = 1;
  std::size_t batch = 4096;
  ModelFlags model;
  PrepFlags prep;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("train", "Build embeddings from a corpus in one streaming pass");
    c->add_option("input", input, "Corpus text file")->required();
    c->add_option("-o,--output", output, "Embedding file")->required();
    c->add_option("--n", n, "Embedding dimension")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--shards", shards, "Parallel trainers, merged at the end")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c->add_option("--batch", batch, "Sentences per shard hand-off")->capture_default_str()->check(CLI::PositiveNumber);
    model.add(c);
    prep.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    const TrainParams params = model.params(n);
    log_params(params);
    std::vector<StreamingTrainer<>> trainers;
    for (std::size_t i = 0; i < shards; ++i) trainers.emplace_back(params);

    std::vector<Sentence> pending;
    std::size_t sentences = 0;
    auto flush = [&] {
      if (shards == 1) {
        for (const auto& s : pending) trainers[0].consume(s);
      } else {
        auto ranges = shard_ranges(pending.size(), shards);
        std::vector<std::exception_ptr> errors(shards);
        {
          std::vector<std::jthread> workers;
          for (std::size_t i = 0; i < shards; ++i) {
            workers.emplace_back([&, i] {
              try {
                for (std::size_t s = ranges[i].first; s < ranges[i].second; ++s) trainers[i].consume(pending[s]);
              } catch (...) {
                errors[i] = std::current_exception();
              }
            });
          }
        }
        for (auto& e : errors) {
          if (e) std::rethrow_exception(e);
        }
      }
      pending.clear();
    };
    stream_corpus(input, prep, model.seed, [&](Sentence& s) {
      ++sentences;
      pending.push_back(std::move(s));
      if (pending.size() >= batch * shards) flush();
    });
    flush();
    if (sentences == 0) throw TrainingError("corpus has no sentences after preprocessing");

    EmbeddingTable table = std::move(trainers[0]).release();
    for (std::size_t i = 1; i < shards; ++i) merge_into(table, trainers[i].table());
    std::cerr << "hash2vec: vocab=" << table.size() << " tokens=" << table.token_count() << '\n';
    save_embeddings(output, table);
  }
};

struct MergeCmd {
  std::vector<std::string> inputs;
  std::string output;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("merge", "Sum embedding files trained with identical parameters");
    c->add_option("inputs", inputs, "Embedding files")->required();
    c->add_option("-o,--output", output, "Merged embedding file")->required();
    c->callback([this] { run(); });
  }

  void run() {
    EmbeddingTable acc = load_embeddings(inputs.front());
    for (std::size_t i = 1; i < inputs.size(); ++i) merge_into(acc, load_embeddings(inputs[i]));
    save_embeddings(output, acc);
  }
};

struct ExportCmd {
  std::string input, output, metadata, format = "word2vec";
  bool float32 = false;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("export", "Convert an embedding file for other tools");
    c->add_option("input", input, "Embedding file")->required();
    c->add_option("-o,--output", output, "Output file (default stdout)");
    c->add_option("--format", format)->capture_default_str()->check(CLI::IsMember({"word2vec", "tsv"}));
    c->add_option("--metadata", metadata, "Word list written alongside --format tsv");
    c->add_flag("--float32", float32, "Round components to single precision");
    c->callback([this] { run(); });
  }

  void run() {
    if (format == "tsv" && metadata.empty()) throw UsageError("--format tsv needs --metadata");
    EmbeddingTable table = load_embeddings(input);
    Output out(output);
    ExportOptions opts{float32};
    if (format == "word2vec") {
      write_word2vec_text(out.stream(), table, opts);
    } else {
      Output meta(metadata);
      write_tsv(out.stream(), meta.stream(), table, opts);
      meta.close();
    }
    out.close();
  }
};

struct QueryCmd {
  std::string model;
  std::vector<std::string> words;
  std::size_t topk = 10;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("query", "Nearest neighbours by cosine, one JSON object per line");
    c->add_option("--model", model, "Embedding file")->required();
    c->add_option("words", words, "Query words")->required();
    c->add_option("--topk", topk)->capture_default_str();
    c->callback([this] { run(); });
  }

  void run() {
    EmbeddingTable table = load_embeddings(model);
    QueryIndex index(table);
    for (const auto& w : words) {
      auto hits = index.nearest(detail::lowercase(w), topk);
      for (std::size_t i = 0; i < hits.size(); ++i) {
        nlohmann::json j{{"query", w}, {"rank", i + 1}, {"word", hits[i].word}, {"score", hits[i].score}};
        std::cout << j.dump() << '\n';
      }
    }
  }
};

struct AnalogyCmd {
  std::string model;
  std::vector<std::string> words;
  std::size_t topk = 10;
  std::string mode = "cosine";

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("analogy", "x is to y as z is to ?: rank words against x + y - z");
    c->add_option("--model", model, "Embedding file")->required();
    c->add_option("words", words, "x y z")->required()->expected(3);
    c->add_option("--topk", topk)->capture_default_str();
    c->add_option("--mode", mode)->capture_default_str()->check(CLI::IsMember({"cosine", "additive", "raw_dot"}));
    c->callback([this] { run(); });
  }

  void run() {
    EmbeddingTable table = load_embeddings(model);
    AnalogyMode m = mode == "additive" ? AnalogyMode::additive
                    : mode == "raw_dot" ? AnalogyMode::raw_dot
                                        : AnalogyMode::cosine;
    std::vector<std::string> q;
    for (const auto& w : words) q.push_back(detail::lowercase(w));
    auto hits = QueryIndex(table).analogy(q[0], q[1], q[2], topk, m);
    for (std::size_t i = 0; i < hits.size(); ++i) {
      nlohmann::json j{{"x", q[0]},          {"y", q[1]},           {"z", q[2]},
                       {"rank", i + 1},      {"word", hits[i].word}, {"score", hits[i].score}};
      std::cout << j.dump() << '\n';
    }
  }
};

struct EvaluateCmd {
  std::string model, dataset;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("evaluate", "Spearman correlation with human similarity scores");
    c->add_option("--model", model, "Embedding file")->required();
    c->add_option("--dataset", dataset, "word,word,score file (tab or comma separated)")->required();
    c->callback([this] { run(); });
  }

  void run() {
    auto ds = load_dataset_file(dataset);
    auto r = evaluate(load_embeddings(model), ds);
    std::cout.precision(17);
    std::cout << "rho=" << r.spearman_rho << "\ncovered=" << r.covered << "\nskipped=" << r.skipped << '\n';
  }
};

struct SweepCmd {
  std::string input, dataset, output;
  std::vector<std::size_t> dims{64, 128, 256, 512, 1024, 2048, 4096};
  std::size_t threads = 1;
  ModelFlags model;
  PrepFlags prep;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("sweep", "Similarity score across embedding dimensions, with the exact-matrix reference");
    c->add_option("input", input, "Corpus text file")->required();
    c->add_option("--dataset", dataset)->required();
    c->add_option("--dims", dims, "Ascending dimensions")->capture_default_str()->delimiter(',');
    c->add_option("--threads", threads, "Dimensions trained at once")->capture_default_str();
    c->add_option("-o,--output", output, "Curve CSV (default stdout)");
    model.add(c);
    prep.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    const TrainParams base = model.params(dims.empty() ? 1 : dims.front());
    log_params(base);
    auto ds = load_dataset_file(dataset);
    auto stream = load_corpus(input, prep, model.seed);
    auto curve = sweep_dimensions(stream, base, dims, ds, threads);
    Output out(output);
    write_curve_csv(out.stream(), curve);
    out.close();
  }
};

struct OracleCompareCmd {
  std::string input, output, per_pair;
  std::vector<std::size_t> dims;
  std::size_t pairs = 2000;
  std::uint64_t pair_seed = 0;
  std::size_t vocab_cap = OracleOptions{}.vocab_cap;
  CLI::Option* pair_seed_opt = nullptr;
  ModelFlags model;
  PrepFlags prep;

  void add(CLI::App& root) {
    auto* c = root.add_subcommand("oracle-compare", "Inner-product distortion of hashed vectors against the exact matrix");
    c->add_option("input", input, "Corpus text file")->required();
    c->add_option("--n", dims, "Embedding dimension; repeat for several")->required();
    c->add_option("--pairs", pairs, "Sampled word pairs")->capture_default_str();
    pair_seed_opt = c->add_option("--pair-seed", pair_seed, "Pair sampling seed (default --seed)");
    c->add_option("--vocab-cap", vocab_cap, "Refuse to build more exact rows than this")->capture_default_str();
    c->add_option("--per-pair", per_pair, "Write <prefix>_n<N>.csv with per-pair errors");
    c->add_option("-o,--output", output, "Summary CSV (default stdout)");
    model.add(c);
    prep.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    auto stream = load_corpus(input, prep, model.seed);
    auto freqs = count_frequencies(stream);
    std::vector<std::string> vocab;
    for (const auto& [w, c] : freqs.ranked()) vocab.push_back(w);
    std::sort(vocab.begin(), vocab.end());
    std::uint64_t seed = *pair_seed_opt ? pair_seed : model.seed;
    std::cerr << "hash2vec: pair_seed=" << seed << '\n';
    auto sample = sample_pairs(vocab, pairs, seed);

    OracleOptions opts;
    opts.vocab_cap = vocab_cap;
    opts.rows.emplace();
    for (const auto& [a, b] : sample) {
      opts.rows->insert(a);
      opts.rows->insert(b);
    }
    const TrainParams first = model.params(dims.front());
    log_params(first);
    auto matrix = build_cooccurrence(stream, first.window, first.weight, opts);

    Output out(output);
    out.stream().precision(17);
    out.stream() << "n,median_rel_err,p90_rel_err,median_abs_err,rank_spearman,pairs,skipped\n";
    for (std::size_t n : dims) {
      auto table = train(stream, model.params(n));
      auto report = distortion(matrix, table, sample);
      out.stream() << n << ',' << report.median_rel_err << ',' << report.p90_rel_err << ','
                   << report.median_abs_err << ',' << report.rank_spearman << ',' << report.pairs.size() << ','
                   << report.skipped << '\n';
      if (!per_pair.empty()) {
        Output detail(per_pair + "_n" + std::to_string(n) + ".csv");
        write_distortion_csv(detail.stream(), report);
        detail.close();
      }
    }
    out.close();
  }
};

// Config file lines are key=value with keys named like the long flags.
// Command line flags win over the file.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a path");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;

  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::vector<std::string> extra;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (given.count(key)) continue;
    extra.push_back("--" + key + "=" + value);
  }
  auto end = std::find(args.begin(), args.end(), "--");
  args.insert(end, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hash2vec: word embeddings by feature hashing of co-occurrence contexts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hash2vec 0.1.0");

  PreprocessCmd preprocess_cmd;
  TrainCmd train_cmd;
  MergeCmd merge_cmd;
  ExportCmd export_cmd;
  QueryCmd query_cmd;
  AnalogyCmd analogy_cmd;
  EvaluateCmd evaluate_cmd;
  SweepCmd sweep_cmd;
  OracleCompareCmd oracle_cmd;
  preprocess_cmd.add(app);
  train_cmd.add(app);
  merge_cmd.add(app);
  export_cmd.add(app);
  query_cmd.add(app);
  analogy_cmd.add(app);
  evaluate_cmd.add(app);
  sweep_cmd.add(app);
  oracle_cmd.add(app);

  auto fail = [](const char* what, int code) {
    std::cerr << "hash2vec: error: " << what << '\n';
    return code;
  };
  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    return fail(e.what(), 1);
  } catch (const IoError& e) {
    return fail(e.what(), 2);
  } catch (const Error& e) {
    return fail(e.what(), 3);
  } catch (const std::bad_alloc&) {
    return fail("out of memory", 3);
  } catch (const std::exception& e) {
    return fail(e.what(), 3);
  }
  return 0;
}
