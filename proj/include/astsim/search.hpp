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

// Encoding database and ranked similarity search.
//
// Database file: a header JSON line
//   {"db":"v1","ckpt":<params hash>,"n":int,"inline_beta":int}
// followed by one JSON line per record
//   {"name":str,"origin":str,"arch":str,"c":int,"v":[float,...]}

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "astsim/ast.hpp"
#include "astsim/ast_json.hpp"
#include "astsim/calibration.hpp"
#include "astsim/error.hpp"
#include "astsim/params.hpp"
#include "astsim/siamese.hpp"
#include "astsim/tree_lstm.hpp"

namespace astsim {

inline constexpr double kDefaultDecisionThreshold = 0.84;

struct EncodedFunction {
  std::string name;
  std::string origin;
  std::string arch;
  Vector v;
  std::int64_t callee_count = 0;
};

struct EncodingDb {
  std::string ckpt_hash;
  std::size_t n = 0;
  std::int64_t inline_beta = kDefaultInlineBeta;
  std::vector<EncodedFunction> records;
};

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Each index is
// handled exactly once, so results written by index are order-stable.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  const std::size_t chunk = (count + jobs - 1) / jobs;
  for (std::size_t j = 0; j < jobs; ++j) {
    const std::size_t lo = j * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

inline EncodedFunction encode_function(const FunctionAst& ast, const ModelParams& p,
                                       std::int64_t inline_beta) {
  return {ast.name, ast.origin, ast.arch, encode_ast(ast.root, p).v,
          callee_count(ast, inline_beta)};
}

inline EncodingDb encode_functions(const std::vector<FunctionAst>& asts, const ModelParams& p,
                                   std::int64_t inline_beta = kDefaultInlineBeta,
                                   std::size_t jobs = 1) {
  EncodingDb db;
  db.ckpt_hash = params_hash(p);
  db.n = p.n;
  db.inline_beta = inline_beta;
  db.records.resize(asts.size());
  parallel_for(asts.size(), jobs,
               [&](std::size_t i) { db.records[i] = encode_function(asts[i], p, inline_beta); });
  return db;
}

inline Json db_header_json(const EncodingDb& db) {
  Json h = Json::object();
  h["db"] = "v1";
  h["ckpt"] = db.ckpt_hash;
  h["n"] = db.n;
  h["inline_beta"] = db.inline_beta;
  return h;
}

inline std::string record_to_json(const EncodedFunction& r) {
  Json j = Json::object();
  j["name"] = r.name;
  j["origin"] = r.origin;
  j["arch"] = r.arch;
  j["c"] = r.callee_count;
  j["v"] = r.v;
  return j.dump();
}

inline void write_db(std::ostream& out, const EncodingDb& db) {
  out << db_header_json(db).dump() << '\n';
  for (const EncodedFunction& r : db.records) out << record_to_json(r) << '\n';
}

inline EncodingDb read_db(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty encoding database");
  Json h = detail::parse_json_text(line);
  if (!h.is_object() || h.value("db", "") != "v1") throw SchemaError("not a v1 encoding database");
  EncodingDb db;
  db.ckpt_hash = detail::require_string(h, "ckpt");
  db.n = detail::require(h, "n").get<std::size_t>();
  db.inline_beta = detail::require(h, "inline_beta").get<std::int64_t>();
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = detail::parse_json_text(line, lineno - 1);
    EncodedFunction r;
    r.name = detail::require_string(j, "name");
    r.origin = detail::require_string(j, "origin");
    r.arch = detail::require_string(j, "arch");
    r.callee_count = detail::require(j, "c").get<std::int64_t>();
    r.v = detail::require(j, "v").get<Vector>();
    if (r.v.size() != db.n) {
      throw SchemaError("record at line " + std::to_string(lineno) + " has wrong dimension");
    }
    if (r.callee_count < 0) throw SchemaError("negative callee count");
    db.records.push_back(std::move(r));
  }
  return db;
}

inline EncodingDb read_db_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_db(in);
}

inline void write_db_file(const std::string& path, const EncodingDb& db) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_db(out, db);
}

// Appends records to an existing database file (creating it when absent).
// Refuses to mix checkpoints.
inline void append_db_file(const std::string& path, const EncodingDb& db) {
  std::ifstream probe(path);
  if (!probe) {
    write_db_file(path, db);
    return;
  }
  std::string line;
  std::getline(probe, line);
  Json h = detail::parse_json_text(line);
  std::string existing = detail::require_string(h, "ckpt");
  if (existing != db.ckpt_hash) throw CheckpointMismatch(db.ckpt_hash, existing);
  probe.close();
  std::ofstream out(path, std::ios::app);
  for (const EncodedFunction& r : db.records) out << record_to_json(r) << '\n';
}

struct SearchHit {
  std::size_t index = 0;  // record position in the database
  std::string name;
  std::string origin;
  std::string arch;
  double m = 0.0;  // AST similarity
  double s = 0.0;  // callee calibration
  double f = 0.0;  // final score
};

// Strict total order: F descending, then (name, origin) ascending, then
// database position.
inline bool hit_before(const SearchHit& a, const SearchHit& b) {
  if (a.f != b.f) return a.f > b.f;
  return std::tie(a.name, a.origin, a.index) < std::tie(b.name, b.origin, b.index);
}

// Scores every record with F = M * S, keeps F >= threshold and returns the
// best `top_k` (0 = all) in hit_before order.
inline std::vector<SearchHit> rank_search(const EncodedFunction& query, const EncodingDb& db,
                                          const ModelParams& p,
                                          double threshold = kDefaultDecisionThreshold,
                                          std::size_t top_k = 0, std::size_t jobs = 1) {
  const std::string hash = params_hash(p);
  if (db.ckpt_hash != hash) throw CheckpointMismatch(hash, db.ckpt_hash);
  if (db.records.empty()) throw DatasetError("encoding database is empty");
  if (query.v.size() != p.n) throw DimensionError("query encoding has wrong dimension");

  std::vector<SearchHit> scored(db.records.size());
  parallel_for(db.records.size(), jobs, [&](std::size_t i) {
    const EncodedFunction& r = db.records[i];
    SearchHit& h = scored[i];
    h.index = i;
    h.m = similarity(query.v, r.v, p).sim;
    h.s = calibrate(query.callee_count, r.callee_count);
    h.f = final_score(h.m, h.s);
  });
  std::vector<SearchHit> hits;
  for (SearchHit& h : scored) {
    if (h.f >= threshold) {
      const EncodedFunction& r = db.records[h.index];
      h.name = r.name;
      h.origin = r.origin;
      h.arch = r.arch;
      hits.push_back(std::move(h));
    }
  }
  std::sort(hits.begin(), hits.end(), hit_before);
  if (top_k > 0 && hits.size() > top_k) hits.resize(top_k);
  return hits;
}

}  // namespace astsim
