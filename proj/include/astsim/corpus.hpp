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

// Desk-scale training data: synthetic mini-language programs, per-"arch"
// variant mutation, labeled pair construction and train/test splitting.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "astsim/ast.hpp"
#include "astsim/ast_json.hpp"
#include "astsim/calibration.hpp"
#include "astsim/error.hpp"
#include "astsim/mini_lang.hpp"
#include "astsim/util.hpp"

namespace astsim {

// Arch tags handed out to variants, in order; further variants get "v<i>".
inline std::string variant_arch(std::size_t i) {
  static const char* kArchs[] = {"x86", "arm", "x64", "ppc"};
  if (i < 4) return kArchs[i];
  return "v" + std::to_string(i);
}

// ---------------------------------------------------------------------------
// Synthetic source generation

namespace detail {

class SourceGen {
 public:
  SourceGen(Rng& rng, std::size_t fn_index, std::size_t num_params)
      : rng_(rng), fn_index_(fn_index), num_params_(num_params) {}

  std::string function(const std::string& name) {
    std::ostringstream out;
    out << "fn " << name << "(";
    for (std::size_t p = 0; p < num_params_; ++p) out << (p ? ", " : "") << "a" << p;
    out << ") {\n";
    std::size_t n = static_cast<std::size_t>(rng_.range(2, 6));
    for (std::size_t i = 0; i < n; ++i) out << statement(1);
    out << "  return " << expr(2) << ";\n}\n";
    return out.str();
  }

 private:
  std::string var() {
    std::size_t pool = num_params_ + 3;
    std::size_t i = rng_.index(pool);
    return i < num_params_ ? "a" + std::to_string(i) : "t" + std::to_string(i - num_params_);
  }

  std::string lvalue() {
    if (rng_.chance(0.2)) return var() + "[" + expr(1) + "]";
    return var();
  }

  std::string call() {
    std::string out = "f" + std::to_string(rng_.index(fn_index_)) + "(";
    std::size_t nargs = rng_.index(3);
    for (std::size_t i = 0; i < nargs; ++i) out += (i ? ", " : "") + expr(0);
    return out + ")";
  }

  std::string expr(int depth) {
    std::size_t choice = rng_.index(depth <= 0 ? 3 : 8);
    switch (choice) {
      case 0:
      case 1:
        return var();
      case 2:
        if (rng_.chance(0.1)) return "\"s" + std::to_string(rng_.index(9)) + "\"";
        return std::to_string(rng_.index(16));
      case 3:
        if (fn_index_ > 0) return call();
        [[fallthrough]];
      case 4:
        if (rng_.chance(0.5)) return var() + "[" + expr(depth - 1) + "]";
        [[fallthrough]];
      default: {
        static const char* kOps[] = {"+", "-", "*", "/", "|", "^", "&", "%",
                                     "<<", ">>", "+", "-", "*"};
        const char* op = kOps[rng_.index(std::size(kOps))];
        return "(" + expr(depth - 1) + " " + op + " " + expr(depth - 1) + ")";
      }
    }
  }

  std::string cond(int depth) {
    static const char* kCmps[] = {"<", ">", "<=", ">=", "==", "!="};
    std::string c = expr(depth) + " " + kCmps[rng_.index(6)] + " " + expr(depth - 1);
    if (rng_.chance(0.15)) c = "(" + c + ") && " + var();
    return c;
  }

  std::string indent(int level) const { return std::string(static_cast<std::size_t>(level) * 2, ' '); }

  std::string body(int level) {
    std::string out = "{\n";
    std::size_t n = static_cast<std::size_t>(rng_.range(1, 3));
    for (std::size_t i = 0; i < n; ++i) out += statement(level + 1);
    return out + indent(level) + "}\n";
  }

  std::string statement(int level) {
    std::string pad = indent(level);
    std::size_t choice = rng_.index(level >= 3 ? 4 : 11);
    switch (choice) {
      case 0:
      case 1:
        return pad + lvalue() + " = " + expr(2) + ";\n";
      case 2: {
        static const char* kCompound[] = {"+=", "-=", "*=", "/=", "|=", "^=", "&="};
        return pad + var() + " " + kCompound[rng_.index(7)] + " " + expr(1) + ";\n";
      }
      case 3:
        if (fn_index_ > 0) return pad + call() + ";\n";
        return pad + var() + (rng_.chance(0.5) ? "++" : "--") + ";\n";
      case 4:
      case 5: {
        std::string out = pad + "if (" + cond(1) + ") " + body(level);
        if (rng_.chance(0.4)) {
          out.pop_back();
          out += " else " + body(level);
        }
        return out;
      }
      case 6:
        return pad + "while (" + cond(1) + ") " + body(level);
      case 7: {
        std::string v = var();
        return pad + "for (" + v + " = 0; " + v + " < " + expr(1) + "; " + v + "++) " + body(level);
      }
      case 8: {
        std::string out = pad + "switch (" + var() + ") {\n";
        std::size_t arms = static_cast<std::size_t>(rng_.range(1, 3));
        for (std::size_t a = 0; a < arms; ++a) {
          out += pad + "case " + std::to_string(a) + ":\n" + statement(level + 1) +
                 indent(level + 1) + "break;\n";
        }
        out += pad + "default:\n" + statement(level + 1) + pad + "}\n";
        return out;
      }
      case 9:
        return pad + "if (" + cond(0) + ") { return " + expr(1) + "; }\n";
      default:
        return pad + var() + " = " + var() + " " + (rng_.chance(0.5) ? "+" : "-") + " " +
               expr(1) + ";\n";
    }
  }

  Rng& rng_;
  std::size_t fn_index_;
  std::size_t num_params_;
};

}  // namespace detail

// Mini-language source with `count` functions f0..f{count-1}. Function i only
// calls functions with smaller indices.
inline std::string generate_synthetic_source(std::size_t count, std::uint64_t seed) {
  Rng rng(mix_seed(seed, "synthetic-source"));
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    detail::SourceGen gen(rng, i, static_cast<std::size_t>(rng.range(1, 3)));
    out += gen.function("f" + std::to_string(i));
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Variant mutation

// Upper bound on the number of edits (and on the node-count change) that
// mutate_variant applies to a tree of the given size.
inline std::size_t mutation_budget(std::size_t nodes) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.15 * static_cast<double>(nodes))));
}

namespace detail {

enum class EditRule {
  kCommute,         // add/mul/or/xor/and/eq/ne: swap operands
  kFlipCompare,     // x<y -> y>x, x<=y -> y>=x and back
  kExpandCompound,  // a op= b -> a = a op b
  kCollapseCompound,// a = a op b -> a op= b
  kWrapBlock,       // s -> { s } inside a block
  kUnwrapBlock,     // { s } -> s inside a block
  kDuplicateLeaf,   // insert a copy of a variable read as a no-op statement
};

struct EditSite {
  EditRule rule;
  AstNode* node;
  AstNode* parent;
  std::size_t child_index;
  std::size_t cost;  // |node-count delta|, at least 1
  long delta;
};

inline const std::map<std::string, std::string>& compound_to_op() {
  static const std::map<std::string, std::string> kMap = {
      {"asgor", "or"},   {"asgxor", "xor"}, {"asgand", "and"}, {"asgadd", "add"},
      {"asgsub", "sub"}, {"asgmul", "mul"}, {"asgdiv", "div"}};
  return kMap;
}

inline const std::map<std::string, std::string>& op_to_compound() {
  static const std::map<std::string, std::string> kMap = [] {
    std::map<std::string, std::string> m;
    for (const auto& [k, v] : compound_to_op()) m[v] = k;
    return m;
  }();
  return kMap;
}

inline bool is_commutative(const std::string& kind) {
  static const std::set<std::string> kOps = {"add", "mul", "or", "xor", "and", "eq", "ne"};
  return kOps.count(kind) != 0;
}

inline std::string flipped_compare(const std::string& kind) {
  if (kind == "lt") return "gt";
  if (kind == "gt") return "lt";
  if (kind == "le") return "ge";
  if (kind == "ge") return "le";
  return "";
}

inline void collect_sites(AstNode& root, bool has_var, std::vector<EditSite>& sites) {
  struct Frame {
    AstNode* node;
    AstNode* parent;
    std::size_t index;
  };
  std::vector<Frame> stack{{&root, nullptr, 0}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    AstNode& n = *f.node;
    if (n.children.size() == 2 && is_commutative(n.kind)) {
      sites.push_back({EditRule::kCommute, &n, f.parent, f.index, 1, 0});
    }
    if (n.children.size() == 2 && !flipped_compare(n.kind).empty()) {
      sites.push_back({EditRule::kFlipCompare, &n, f.parent, f.index, 1, 0});
    }
    if (n.children.size() == 2 && compound_to_op().count(n.kind)) {
      long delta = 1 + static_cast<long>(node_count(n.children[0]));
      sites.push_back({EditRule::kExpandCompound, &n, f.parent, f.index,
                       static_cast<std::size_t>(delta), delta});
    }
    if (n.kind == "asg" && n.children.size() == 2 && n.children[1].children.size() == 2 &&
        op_to_compound().count(n.children[1].kind) &&
        n.children[1].children[0] == n.children[0]) {
      long delta = -(1 + static_cast<long>(node_count(n.children[0])));
      sites.push_back({EditRule::kCollapseCompound, &n, f.parent, f.index,
                       static_cast<std::size_t>(-delta), delta});
    }
    if (n.kind == "block") {
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        AstNode& c = n.children[i];
        if (c.kind == "block" && c.children.size() == 1) {
          sites.push_back({EditRule::kUnwrapBlock, &c, &n, i, 1, -1});
        } else if (c.kind != "block") {
          sites.push_back({EditRule::kWrapBlock, &c, &n, i, 1, 1});
        }
      }
      if (has_var) sites.push_back({EditRule::kDuplicateLeaf, &n, f.parent, f.index, 1, 1});
    }
    for (std::size_t i = n.children.size(); i-- > 0;) {
      stack.push_back({&n.children[i], &n, i});
    }
  }
}

inline void apply_edit(const EditSite& site, Rng& rng) {
  AstNode& n = *site.node;
  switch (site.rule) {
    case EditRule::kCommute:
      std::swap(n.children[0], n.children[1]);
      break;
    case EditRule::kFlipCompare:
      n.kind = flipped_compare(n.kind);
      std::swap(n.children[0], n.children[1]);
      break;
    case EditRule::kExpandCompound: {
      AstNode lhs = n.children[0];
      AstNode op(compound_to_op().at(n.kind), {lhs, std::move(n.children[1])});
      n.kind = "asg";
      n.children[1] = std::move(op);
      break;
    }
    case EditRule::kCollapseCompound: {
      AstNode rhs = std::move(n.children[1].children[1]);
      n.kind = op_to_compound().at(n.children[1].kind);
      n.children[1] = std::move(rhs);
      break;
    }
    case EditRule::kWrapBlock: {
      AstNode inner = std::move(n);
      n = AstNode("block", {std::move(inner)});
      break;
    }
    case EditRule::kUnwrapBlock: {
      AstNode inner = std::move(n.children[0]);
      n = std::move(inner);
      break;
    }
    case EditRule::kDuplicateLeaf: {
      auto pos = static_cast<std::ptrdiff_t>(rng.index(n.children.size() + 1));
      n.children.insert(n.children.begin() + pos, AstNode("var"));
      break;
    }
  }
}

}  // namespace detail

// Returns a deterministic, semantics-preserving variant of `ast` tagged with
// `arch_tag`. At most mutation_budget(node_count) edits are applied and the
// node count changes by at most the same bound.
inline FunctionAst mutate_variant(const FunctionAst& ast, const std::string& arch_tag,
                                  std::uint64_t seed) {
  FunctionAst out = ast;
  out.arch = arch_tag;
  const std::size_t original = node_count(ast.root);
  const std::size_t budget = mutation_budget(original);
  Rng rng(mix_seed(mix_seed(seed, arch_tag), ast.name));
  std::size_t target = static_cast<std::size_t>(rng.range(1, static_cast<std::int64_t>(budget)));
  bool has_var = false;
  for_each_node(ast.root, [&](const AstNode& n, std::size_t) { has_var |= n.kind == "var"; });

  std::size_t spent = 0;
  std::size_t current = original;
  for (std::size_t edit = 0; edit < target; ++edit) {
    std::vector<detail::EditSite> sites;
    detail::collect_sites(out.root, has_var, sites);
    std::erase_if(sites, [&](const detail::EditSite& s) {
      if (spent + s.cost > budget) return true;
      long after = static_cast<long>(current) + s.delta;
      return original >= kMinNodes && after < static_cast<long>(kMinNodes);
    });
    if (sites.empty()) break;
    const detail::EditSite& site = sites[rng.index(sites.size())];
    spent += site.cost;
    current = static_cast<std::size_t>(static_cast<long>(current) + site.delta);
    detail::apply_edit(site, rng);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pairs and splits

struct PairSample {
  AstNode t1;
  AstNode t2;
  std::int64_t c1 = 0;
  std::int64_t c2 = 0;
  int label = 1;  // +1 homologous, -1 non-homologous
  std::pair<std::string, std::string> archs;
  // Function identities, used for function-level splitting. May be empty
  // when read from files that do not carry them.
  std::pair<std::string, std::string> names;

  bool homologous() const { return label > 0; }
};

// Function identity -> arch tag -> AST.
using VariantMap = std::map<std::string, std::map<std::string, FunctionAst>>;

inline std::string function_key(const FunctionAst& ast) {
  return ast.origin.empty() ? ast.name : ast.origin + "/" + ast.name;
}

inline VariantMap group_variants(const std::vector<FunctionAst>& asts) {
  VariantMap out;
  for (const FunctionAst& a : asts) out[function_key(a)][a.arch] = a;
  return out;
}

// Homologous pairs join the same function across every two arch tags;
// each positive gets `negatives_per_positive` non-homologous partners drawn
// from other functions under a different arch tag. Trees below kMinNodes
// never appear in a pair.
inline std::vector<PairSample> build_pairs(const VariantMap& functions,
                                           std::size_t negatives_per_positive,
                                           std::uint64_t seed,
                                           std::int64_t inline_beta = kDefaultInlineBeta) {
  if (functions.size() < 2) {
    throw DatasetError("need at least two distinct functions to form negative pairs");
  }
  auto eligible = [](const FunctionAst& a) { return node_count(a.root) >= kMinNodes; };

  struct Ref {
    const std::string* key;
    const FunctionAst* ast;
  };
  std::vector<Ref> pool;
  for (const auto& [key, variants] : functions) {
    for (const auto& [arch, ast] : variants) {
      if (eligible(ast)) pool.push_back({&key, &ast});
    }
  }

  auto make = [&](const std::string& k1, const FunctionAst& a, const std::string& k2,
                  const FunctionAst& b, int label) {
    PairSample p;
    p.t1 = a.root;
    p.t2 = b.root;
    p.c1 = callee_count(a, inline_beta);
    p.c2 = callee_count(b, inline_beta);
    p.label = label;
    p.archs = {a.arch, b.arch};
    p.names = {k1, k2};
    return p;
  };

  Rng rng(mix_seed(seed, "pairs"));
  std::vector<PairSample> out;
  for (const auto& [key, variants] : functions) {
    for (auto a = variants.begin(); a != variants.end(); ++a) {
      for (auto b = std::next(a); b != variants.end(); ++b) {
        if (!eligible(a->second) || !eligible(b->second)) continue;
        out.push_back(make(key, a->second, key, b->second, +1));
        for (std::size_t n = 0; n < negatives_per_positive; ++n) {
          std::vector<const Ref*> candidates;
          for (const Ref& r : pool) {
            if (*r.key != key && r.ast->arch != a->first) candidates.push_back(&r);
          }
          if (candidates.empty()) break;
          const Ref* partner = candidates[rng.index(candidates.size())];
          out.push_back(make(key, a->second, *partner->key, *partner->ast, -1));
        }
      }
    }
  }
  if (out.empty()) throw DatasetError("no valid pairs could be formed");
  return out;
}

struct DatasetSplit {
  std::vector<PairSample> train;
  std::vector<PairSample> test;
  std::uint64_t seed = 0;
};

// Shuffles deterministically and puts floor(ratio * N) pairs in train. With
// `by_function`, whole functions are assigned to one side and pairs that
// would straddle the split are dropped.
inline DatasetSplit split(std::vector<PairSample> pairs, double ratio, std::uint64_t seed,
                          bool by_function = false) {
  if (pairs.size() < 5) {
    throw DatasetError("need at least 5 pairs to split, got " + std::to_string(pairs.size()));
  }
  if (!(ratio > 0.0 && ratio < 1.0)) throw DatasetError("split ratio must be in (0, 1)");
  Rng rng(mix_seed(seed, "split"));
  DatasetSplit out;
  out.seed = seed;
  if (!by_function) {
    rng.shuffle(pairs);
    auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(pairs.size())));
    out.train.assign(std::make_move_iterator(pairs.begin()),
                     std::make_move_iterator(pairs.begin() + static_cast<std::ptrdiff_t>(n_train)));
    out.test.assign(std::make_move_iterator(pairs.begin() + static_cast<std::ptrdiff_t>(n_train)),
                    std::make_move_iterator(pairs.end()));
    return out;
  }
  std::set<std::string> name_set;
  for (const PairSample& p : pairs) {
    if (p.names.first.empty() || p.names.second.empty()) {
      throw DatasetError("function-level split needs pair provenance names");
    }
    name_set.insert(p.names.first);
    name_set.insert(p.names.second);
  }
  std::vector<std::string> names(name_set.begin(), name_set.end());
  rng.shuffle(names);
  auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(names.size())));
  std::set<std::string> train_names(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(n_train));
  rng.shuffle(pairs);
  for (PairSample& p : pairs) {
    bool a = train_names.count(p.names.first) != 0;
    bool b = train_names.count(p.names.second) != 0;
    if (a && b) {
      out.train.push_back(std::move(p));
    } else if (!a && !b) {
      out.test.push_back(std::move(p));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pair JSONL: {"t1":node,"t2":node,"c1":int,"c2":int,"label":+-1,"archs":[a,b]}
// plus an optional "names":[a,b].

inline std::string pair_to_json(const PairSample& p) {
  Json j = Json::object();
  j["t1"] = node_to_json(p.t1);
  j["t2"] = node_to_json(p.t2);
  j["c1"] = p.c1;
  j["c2"] = p.c2;
  j["label"] = p.label;
  j["archs"] = Json::array({p.archs.first, p.archs.second});
  if (!p.names.first.empty() || !p.names.second.empty()) {
    j["names"] = Json::array({p.names.first, p.names.second});
  }
  return j.dump();
}

inline PairSample json_to_pair(const Json& j) {
  PairSample p;
  p.t1 = json_to_node(detail::require(j, "t1"));
  p.t2 = json_to_node(detail::require(j, "t2"));
  const Json& c1 = detail::require(j, "c1");
  const Json& c2 = detail::require(j, "c2");
  const Json& label = detail::require(j, "label");
  if (!c1.is_number_integer() || !c2.is_number_integer() || !label.is_number_integer()) {
    throw SchemaError("c1, c2 and label must be integers");
  }
  p.c1 = c1.get<std::int64_t>();
  p.c2 = c2.get<std::int64_t>();
  p.label = label.get<int>();
  if (p.label != 1 && p.label != -1) throw SchemaError("label must be +1 or -1");
  if (p.c1 < 0 || p.c2 < 0) throw SchemaError("callee counts must be nonnegative");
  const Json& archs = detail::require(j, "archs");
  if (!archs.is_array() || archs.size() != 2 || !archs[0].is_string() || !archs[1].is_string()) {
    throw SchemaError("archs must be a pair of strings");
  }
  p.archs = {archs[0].get<std::string>(), archs[1].get<std::string>()};
  if (auto it = j.find("names"); it != j.end() && it->is_array() && it->size() == 2) {
    p.names = {(*it)[0].get<std::string>(), (*it)[1].get<std::string>()};
  }
  return p;
}

inline void write_pairs_jsonl(std::ostream& out, const std::vector<PairSample>& pairs) {
  for (const PairSample& p : pairs) out << pair_to_json(p) << '\n';
}

inline std::vector<PairSample> read_pairs_jsonl(std::istream& in) {
  std::vector<PairSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = detail::parse_json_text(line, lineno - 1);
    try {
      out.push_back(json_to_pair(j));
    } catch (const SchemaError& e) {
      throw SchemaError(std::string(e.what()) + " (line " + std::to_string(lineno) + ")");
    }
  }
  return out;
}

inline std::vector<PairSample> read_pairs_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_pairs_jsonl(in);
}

// Builds `variants` mutated copies of each function. Each variant is tagged
// with variant_arch(i).
inline std::vector<FunctionAst> make_variants(const std::vector<FunctionAst>& functions,
                                              std::size_t variants, std::uint64_t seed) {
  std::vector<FunctionAst> out;
  out.reserve(functions.size() * variants);
  for (const FunctionAst& f : functions) {
    for (std::size_t v = 0; v < variants; ++v) {
      out.push_back(mutate_variant(f, variant_arch(v), seed));
    }
  }
  return out;
}

// Synthetic corpus: `count` generated functions with `variants` arch variants.
inline std::vector<FunctionAst> synthetic_corpus(std::size_t count, std::size_t variants,
                                                 std::uint64_t seed) {
  auto functions = parse_mini(generate_synthetic_source(count, seed), "synthetic", "src");
  return make_variants(functions, variants, seed);
}

}  // namespace astsim
