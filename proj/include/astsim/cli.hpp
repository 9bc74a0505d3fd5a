// Copyright 2026 The astsim Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver: gen-corpus, train, encode, compare, search, eval.
// Exit codes: 0 success, 1 runtime failure, 2 usage or parse error.

#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "astsim/ast.hpp"
#include "astsim/ast_json.hpp"
#include "astsim/baselines.hpp"
#include "astsim/calibration.hpp"
#include "astsim/config.hpp"
#include "astsim/corpus.hpp"
#include "astsim/error.hpp"
#include "astsim/metrics.hpp"
#include "astsim/mini_lang.hpp"
#include "astsim/params.hpp"
#include "astsim/search.hpp"
#include "astsim/siamese.hpp"

namespace astsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Flag values; unset optionals fall back to the config file, then defaults.
struct Overrides {
  std::optional<std::size_t> d_e, n, epochs, negatives, jobs;
  std::optional<double> lr, decision_threshold, ratio;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> inline_beta;
  std::string config_path;

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) load_config_file(cfg, config_path);
    if (d_e) cfg.d_e = *d_e;
    if (n) cfg.n = *n;
    if (epochs) cfg.epochs = *epochs;
    if (negatives) cfg.negatives = *negatives;
    if (jobs) cfg.jobs = *jobs;
    if (lr) cfg.lr = *lr;
    if (decision_threshold) cfg.decision_threshold = *decision_threshold;
    if (ratio) cfg.ratio = *ratio;
    if (seed) cfg.seed = *seed;
    if (inline_beta) cfg.inline_beta = *inline_beta;
    return cfg;
  }
};

// Raised for problems with the user's input files (exit code 2).
class InputError : public Error {
 public:
  using Error::Error;
};

inline FunctionAst read_single_ast(const std::string& path, const std::string& name) {
  auto asts = read_ast_jsonl_file(path);
  if (asts.empty()) throw InputError(path + ": no AST records");
  if (name.empty()) return asts.front();
  for (const FunctionAst& a : asts) {
    if (a.name == name) return a;
  }
  throw InputError(path + ": no function named " + name);
}

inline std::string fmt(double v, int precision = 6) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << v;
  return out.str();
}

class Driver {
 public:
  Driver(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"AST-based binary function similarity"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    Overrides ov;
    auto add_common = [&](CLI::App* sub) {
      sub->add_option("--config", ov.config_path, "key=value config file")
          ->check(CLI::ExistingFile);
      sub->add_option("--seed", ov.seed, "random seed");
      sub->add_option("--inline-beta", ov.inline_beta, "inlining filter threshold");
      sub->add_option("--jobs", ov.jobs, "worker threads");
    };

    // gen-corpus
    std::string gen_source_dir, gen_out = "corpus.jsonl", gen_pairs_out;
    std::optional<std::size_t> gen_synthetic;
    std::size_t gen_variants = 2;
    auto* gen = app.add_subcommand("gen-corpus", "generate an AST corpus");
    gen->add_option("source-dir", gen_source_dir, "directory of .mini sources");
    gen->add_option("--synthetic", gen_synthetic, "number of generated functions");
    gen->add_option("--variants", gen_variants, "arch variants per function")
        ->check(CLI::PositiveNumber);
    gen->add_option("--out", gen_out, "corpus JSONL output");
    gen->add_option("--pairs-out", gen_pairs_out, "also write the labeled pair JSONL");
    gen->add_option("--negatives", ov.negatives, "negative pairs per positive");
    add_common(gen);

    // train
    std::string train_corpus, train_out = "model.ckpt", train_trace, train_test_pairs;
    bool function_split = false, head_bias = false, leaf_ones = false;
    std::size_t patience = 0;
    auto* tr = app.add_subcommand("train", "train the Siamese Tree-LSTM");
    tr->add_option("corpus", train_corpus, "corpus JSONL")->required()->check(CLI::ExistingFile);
    tr->add_option("--out", train_out, "checkpoint output");
    tr->add_option("--trace", train_trace, "per-epoch metrics JSONL");
    tr->add_option("--test-pairs-out", train_test_pairs, "write the held-out pairs");
    tr->add_option("--epochs", ov.epochs, "training epochs");
    tr->add_option("--d-e", ov.d_e, "embedding size");
    tr->add_option("--hidden", ov.n, "hidden size");
    tr->add_option("--lr", ov.lr, "AdaGrad learning rate");
    tr->add_option("--negatives", ov.negatives, "negative pairs per positive");
    tr->add_option("--ratio", ov.ratio, "train fraction");
    tr->add_option("--patience", patience, "early-stop patience in epochs (0 = off)");
    tr->add_flag("--function-split", function_split, "split by function instead of by pair");
    tr->add_flag("--head-bias", head_bias, "add a bias to the similarity head");
    tr->add_flag("--leaf-ones", leaf_ones, "absent children get all-ones states");
    add_common(tr);

    // encode
    std::string enc_corpus, enc_ckpt, enc_out = "encodings.db";
    bool enc_append = false;
    auto* enc = app.add_subcommand("encode", "encode a corpus into a search database");
    enc->add_option("corpus", enc_corpus, "corpus JSONL")->required()->check(CLI::ExistingFile);
    enc->add_option("--ckpt", enc_ckpt, "checkpoint")->required()->check(CLI::ExistingFile);
    enc->add_option("--out", enc_out, "database output");
    enc->add_flag("--append", enc_append, "append to an existing database");
    add_common(enc);

    // compare
    std::string cmp_a, cmp_b, cmp_ckpt, cmp_name_a, cmp_name_b;
    auto* cmp = app.add_subcommand("compare", "score two functions");
    cmp->add_option("ast1", cmp_a, "AST JSON(L) file")->required()->check(CLI::ExistingFile);
    cmp->add_option("ast2", cmp_b, "AST JSON(L) file")->required()->check(CLI::ExistingFile);
    cmp->add_option("--ckpt", cmp_ckpt, "checkpoint")->required()->check(CLI::ExistingFile);
    cmp->add_option("--name1", cmp_name_a, "function to pick from ast1");
    cmp->add_option("--name2", cmp_name_b, "function to pick from ast2");
    add_common(cmp);

    // search
    std::string s_query, s_db, s_ckpt, s_name, s_out;
    std::size_t s_top_k = 20;
    auto* srch = app.add_subcommand("search", "rank database functions against a query");
    srch->add_option("query", s_query, "query AST JSON(L)")->required()->check(CLI::ExistingFile);
    srch->add_option("db", s_db, "encoding database")->required()->check(CLI::ExistingFile);
    srch->add_option("--ckpt", s_ckpt, "checkpoint")->required()->check(CLI::ExistingFile);
    srch->add_option("--name", s_name, "function to pick from the query file");
    srch->add_option("--threshold", ov.decision_threshold, "decision threshold on F");
    srch->add_option("--top-k", s_top_k, "maximum hits (0 = all)");
    srch->add_option("--out", s_out, "hits JSONL output");
    add_common(srch);

    // eval
    std::string ev_pairs, ev_ckpt, ev_roc;
    bool ev_baselines = false;
    auto* ev = app.add_subcommand("eval", "ROC/AUC over labeled pairs");
    ev->add_option("pairs", ev_pairs, "pair JSONL")->required()->check(CLI::ExistingFile);
    ev->add_option("--ckpt", ev_ckpt, "checkpoint")->required()->check(CLI::ExistingFile);
    ev->add_option("--roc-out", ev_roc, "ROC CSV (threshold,fpr,tpr) of calibrated scores");
    ev->add_flag("--baselines", ev_baselines, "also report Diaphora and tree-edit AUCs");
    add_common(ev);

    std::vector<std::string> argv_storage{"astsim"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitUsage;
    }

    try {
      RunConfig cfg = ov.resolve();
      if (*gen) return gen_corpus(cfg, gen_source_dir, gen_synthetic, gen_variants, gen_out, gen_pairs_out);
      if (*tr) {
        return train_cmd(cfg, train_corpus, train_out, train_trace, train_test_pairs, function_split,
                         head_bias, leaf_ones, patience);
      }
      if (*enc) return encode_cmd(cfg, enc_corpus, enc_ckpt, enc_out, enc_append);
      if (*cmp) return compare_cmd(cfg, cmp_a, cmp_b, cmp_ckpt, cmp_name_a, cmp_name_b);
      if (*srch) return search_cmd(cfg, s_query, s_db, s_ckpt, s_name, s_top_k, s_out);
      if (*ev) return eval_cmd(cfg, ev_pairs, ev_ckpt, ev_roc, ev_baselines);
    } catch (const ParseError& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const SchemaError& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const InputError& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const CheckpointMismatch& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitRuntime;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitRuntime;
    }
    return kExitUsage;
  }

 private:
  void echo(const std::string& cmd, const RunConfig& cfg) {
    out_ << "# astsim " << cmd << " " << cfg.to_string() << "\n";
  }

  int gen_corpus(const RunConfig& cfg, const std::string& source_dir,
                 const std::optional<std::size_t>& synthetic, std::size_t variants,
                 const std::string& out_path, const std::string& pairs_out) {
    if (source_dir.empty() == !synthetic.has_value()) {
      err_ << "error: give exactly one of a source directory or --synthetic N\n";
      return kExitUsage;
    }
    echo("gen-corpus", cfg);
    std::vector<FunctionAst> functions;
    if (synthetic) {
      functions = parse_mini(generate_synthetic_source(*synthetic, cfg.seed), "synthetic", "src");
    } else {
      namespace fs = std::filesystem;
      if (!fs::is_directory(source_dir)) throw InputError(source_dir + " is not a directory");
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(source_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".mini") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const fs::path& file : files) {
        std::ifstream in(file);
        std::stringstream buf;
        buf << in.rdbuf();
        try {
          auto parsed = parse_mini(buf.str(), file.stem().string(), "src");
          functions.insert(functions.end(), parsed.begin(), parsed.end());
        } catch (const ParseError& e) {
          err_ << "error: " << file.string() << ":" << e.line() << ":" << e.column() << ": "
               << e.what() << "\n";
          return kExitUsage;
        }
      }
    }
    auto corpus = make_variants(functions, variants, cfg.seed);
    {
      std::ofstream out(out_path);
      if (!out) throw Error("cannot write " + out_path);
      write_ast_jsonl(out, corpus);
    }
    std::size_t small = 0;
    for (const FunctionAst& a : corpus) small += validate(a).too_small ? 1 : 0;
    out_ << "functions: " << functions.size() << "\n";
    out_ << "asts: " << corpus.size() << " (" << small << " below " << kMinNodes << " nodes)\n";
    try {
      auto pairs = build_pairs(group_variants(corpus), cfg.negatives, cfg.seed, cfg.inline_beta);
      std::size_t pos = static_cast<std::size_t>(
          std::count_if(pairs.begin(), pairs.end(), [](const PairSample& p) { return p.label > 0; }));
      out_ << "pairs: " << pairs.size() << " (" << pos << " homologous, " << pairs.size() - pos
           << " non-homologous)\n";
      if (!pairs_out.empty()) {
        std::ofstream out(pairs_out);
        write_pairs_jsonl(out, pairs);
      }
    } catch (const DatasetError& e) {
      out_ << "pairs: 0 (" << e.what() << ")\n";
      if (!pairs_out.empty()) throw;
    }
    out_ << "wrote " << out_path << "\n";
    return kExitOk;
  }

  int train_cmd(const RunConfig& cfg, const std::string& corpus_path, const std::string& out_path,
                const std::string& trace_path, const std::string& test_pairs_path,
                bool function_split, bool head_bias, bool leaf_ones, std::size_t patience) {
    echo("train", cfg);
    auto corpus = read_ast_jsonl_file(corpus_path);
    auto pairs = build_pairs(group_variants(corpus), cfg.negatives, cfg.seed, cfg.inline_beta);
    DatasetSplit data = split(std::move(pairs), cfg.ratio, cfg.seed, function_split);
    if (data.train.empty()) throw DatasetError("no training pairs");
    out_ << "pairs: train=" << data.train.size() << " test=" << data.test.size() << "\n";

    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.lr = cfg.lr;
    tc.seed = cfg.seed;
    tc.d_e = cfg.d_e;
    tc.n = cfg.n;
    tc.patience = patience;
    tc.head_bias = head_bias;
    tc.leaf_state = leaf_ones ? 1.0 : 0.0;
    tc.on_epoch = [&](std::size_t epoch, double loss, std::optional<double> auc) {
      out_ << "epoch " << epoch << " train_loss=" << fmt(loss)
           << " test_auc=" << (auc ? fmt(*auc) : std::string("n/a")) << "\n";
    };
    TrainResult result = train(data, tc);
    save_checkpoint_file(out_path, result.params, &result.optimizer.accumulators);
    if (!trace_path.empty()) {
      std::ofstream out(trace_path);
      write_trace_jsonl(out, result.trace);
    }
    if (!test_pairs_path.empty()) {
      std::ofstream out(test_pairs_path);
      write_pairs_jsonl(out, data.test);
    }
    const auto& best = result.trace[result.best_epoch - 1];
    out_ << "best epoch: " << result.best_epoch << "\n";
    out_ << "final test AUC: " << (best.test_auc ? fmt(*best.test_auc) : std::string("n/a")) << "\n";
    out_ << "checkpoint: " << out_path << " (" << params_hash(result.params) << ")\n";
    return kExitOk;
  }

  int encode_cmd(const RunConfig& cfg, const std::string& corpus_path, const std::string& ckpt_path,
                 const std::string& out_path, bool append) {
    echo("encode", cfg);
    ModelParams params = load_checkpoint_file(ckpt_path).params;
    auto corpus = read_ast_jsonl_file(corpus_path);
    EncodingDb db = encode_functions(corpus, params, cfg.inline_beta, cfg.jobs);
    if (append) {
      append_db_file(out_path, db);
    } else {
      write_db_file(out_path, db);
    }
    out_ << "encoded: " << db.records.size() << " functions\n";
    out_ << "checkpoint: " << db.ckpt_hash << "\n";
    out_ << "wrote " << out_path << "\n";
    return kExitOk;
  }

  int compare_cmd(const RunConfig& cfg, const std::string& a_path, const std::string& b_path,
                  const std::string& ckpt_path, const std::string& name_a,
                  const std::string& name_b) {
    echo("compare", cfg);
    ModelParams params = load_checkpoint_file(ckpt_path).params;
    FunctionAst a = read_single_ast(a_path, name_a);
    FunctionAst b = read_single_ast(b_path, name_b);
    double m = predict(binarize_lcrs(a.root), binarize_lcrs(b.root), params);
    std::int64_t c1 = callee_count(a, cfg.inline_beta), c2 = callee_count(b, cfg.inline_beta);
    double s = calibrate(c1, c2);
    out_ << a.name << " (" << a.arch << ") vs " << b.name << " (" << b.arch << ")\n";
    out_ << "callees: " << c1 << " vs " << c2 << "\n";
    out_ << "M=" << fmt(m) << " S=" << fmt(s) << " F=" << fmt(final_score(m, s)) << "\n";
    return kExitOk;
  }

  int search_cmd(const RunConfig& cfg, const std::string& query_path, const std::string& db_path,
                 const std::string& ckpt_path, const std::string& name, std::size_t top_k,
                 const std::string& out_path) {
    echo("search", cfg);
    ModelParams params = load_checkpoint_file(ckpt_path).params;
    EncodingDb db = read_db_file(db_path);
    FunctionAst q = read_single_ast(query_path, name);
    EncodedFunction query = encode_function(q, params, db.inline_beta);
    auto hits = rank_search(query, db, params, cfg.decision_threshold, top_k, cfg.jobs);
    out_ << "query: " << q.name << " (" << q.arch << ") threshold: " << cfg.decision_threshold
         << " records: " << db.records.size() << " hits: " << hits.size() << "\n";
    out_ << std::left << std::setw(6) << "rank" << std::setw(24) << "name" << std::setw(16)
         << "origin" << std::setw(8) << "arch" << std::setw(10) << "F" << std::setw(10) << "M"
         << "S\n";
    for (std::size_t i = 0; i < hits.size(); ++i) {
      const SearchHit& h = hits[i];
      out_ << std::left << std::setw(6) << i + 1 << std::setw(24) << h.name << std::setw(16)
           << h.origin << std::setw(8) << h.arch << std::setw(10) << fmt(h.f, 4) << std::setw(10)
           << fmt(h.m, 4) << fmt(h.s, 4) << "\n";
    }
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      for (const SearchHit& h : hits) {
        Json j = Json::object();
        j["name"] = h.name;
        j["origin"] = h.origin;
        j["arch"] = h.arch;
        j["f"] = h.f;
        j["m"] = h.m;
        j["s"] = h.s;
        out << j.dump() << '\n';
      }
    }
    return kExitOk;
  }

  int eval_cmd(const RunConfig& cfg, const std::string& pairs_path, const std::string& ckpt_path,
               const std::string& roc_path, bool baselines) {
    echo("eval", cfg);
    ModelParams params = load_checkpoint_file(ckpt_path).params;
    auto samples = read_pairs_jsonl_file(pairs_path);
    auto prepared = prepare_pairs(samples);
    PairScores scores = score_pairs(prepared, params);
    RocCurve model = roc_auc(scores.model);
    RocCurve calibrated = roc_auc(scores.calibrated);
    YoudenPoint op = youden_threshold(calibrated);
    out_ << "pairs: " << samples.size() << " (" << calibrated.positives << " homologous, "
         << calibrated.negatives << " non-homologous)\n";
    out_ << "AUC (calibrated F): " << fmt(calibrated.auc) << "\n";
    out_ << "AUC (uncalibrated M): " << fmt(model.auc) << "\n";
    out_ << "Youden threshold: " << fmt(op.threshold) << " (J=" << fmt(op.j) << ")\n";
    if (baselines) {
      std::vector<ScoredLabel> dia, ted;
      for (const PairSample& p : samples) {
        dia.push_back({diaphora_similarity(p.t1, p.t2), p.label});
        ted.push_back({tree_edit_similarity(p.t1, p.t2, std::max<std::size_t>(
                                                            kDefaultTedCap, std::max(node_count(p.t1), node_count(p.t2)))),
                       p.label});
      }
      out_ << "AUC (Diaphora prime product): " << fmt(roc_auc(dia).auc) << "\n";
      out_ << "AUC (tree edit similarity): " << fmt(roc_auc(ted).auc) << "\n";
    }
    if (!roc_path.empty()) {
      std::ofstream out(roc_path);
      write_roc_csv(out, calibrated);
      out_ << "wrote " << roc_path << "\n";
    }
    return kExitOk;
  }

  std::ostream& out_;
  std::ostream& err_;
};

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  return Driver(out, err).run(args);
}

}  // namespace astsim::cli
