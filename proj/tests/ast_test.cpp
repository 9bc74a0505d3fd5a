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

#include <set>
#include <string>

#include <gtest/gtest.h>

#include "astsim/ast.hpp"
#include "astsim/ast_json.hpp"
#include "oracles.hpp"

namespace astsim {
namespace {

AstNode leaf(const char* k) { return AstNode(k); }
AstNode node(const char* k, std::vector<AstNode> c) { return AstNode(k, std::move(c)); }

TEST(Digitize, TableRows) {
  EXPECT_EQ(digitize("if"), 1);
  EXPECT_EQ(digitize("while"), 4);
  EXPECT_EQ(digitize("unknown_vector_op"), 43);
  EXPECT_EQ(digitize("num"), 40);
  EXPECT_EQ(digitize("str"), 42);
  EXPECT_EQ(digitize("asm"), 43);
  EXPECT_EQ(digitize(""), 43);
}

TEST(Digitize, GroupRanges) {
  for (const auto& info : kKindTable) {
    if (info.cls == KindClass::kStatement) {
      EXPECT_GE(info.label, 1);
      EXPECT_LE(info.label, 9);
    } else {
      EXPECT_GE(info.label, 10);
    }
  }
  EXPECT_EQ(digitize("asg"), 10);
  EXPECT_EQ(digitize("asgdiv"), 17);
  EXPECT_EQ(digitize("eq"), 18);
  EXPECT_EQ(digitize("le"), 23);
  EXPECT_EQ(digitize("or"), 24);
  EXPECT_EQ(digitize("predec"), 34);
  EXPECT_EQ(digitize("call"), 41);
}

TEST(Digitize, InjectiveOnTableAndTotal) {
  std::set<int> seen;
  for (const auto& info : kKindTable) {
    EXPECT_TRUE(seen.insert(digitize(info.name)).second) << info.name;
    EXPECT_EQ(kind_name(digitize(info.name)), info.name);
  }
  EXPECT_EQ(seen.size(), 43u);
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    for (std::size_t k = rng.index(8); k > 0; --k) s += static_cast<char>('a' + rng.index(26));
    int label = digitize(s);
    EXPECT_GE(label, 1);
    EXPECT_LE(label, 43);
  }
}

TEST(Lcrs, SingleNodeIsFixedPoint) {
  BinTree t = binarize_lcrs(leaf("return"));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.node(0).label, 6);
  EXPECT_EQ(t.node(0).left, -1);
  EXPECT_EQ(t.node(0).right, -1);
}

TEST(Lcrs, HandAppliedExample) {
  // R(A(D), B, C)
  AstNode r = node("block", {node("if", {leaf("var")}), leaf("num"), leaf("str")});
  BinTree t = binarize_lcrs(r);
  ASSERT_EQ(t.size(), 5u);
  auto at = [&](std::int32_t i) { return t.node(static_cast<std::size_t>(i)); };
  auto root = at(0);
  EXPECT_EQ(root.right, -1);
  auto a = at(root.left);
  EXPECT_EQ(a.label, digitize("if"));
  auto d = at(a.left);
  EXPECT_EQ(d.label, digitize("var"));
  EXPECT_EQ(d.left, -1);
  EXPECT_EQ(d.right, -1);
  auto b = at(a.right);
  EXPECT_EQ(b.label, digitize("num"));
  EXPECT_EQ(b.left, -1);
  auto c = at(b.right);
  EXPECT_EQ(c.label, digitize("str"));
  EXPECT_EQ(c.left, -1);
  EXPECT_EQ(c.right, -1);
  EXPECT_TRUE(oracle::same_shape(oracle::reference_lcrs(r).get(), t, 0));
}

TEST(Lcrs, ChainHasNoRightLinks) {
  AstNode r = node("return", {node("neg", {leaf("var")})});
  BinTree t = binarize_lcrs(r);
  ASSERT_EQ(t.size(), 3u);
  for (const auto& n : t.nodes()) EXPECT_EQ(n.right, -1);
  EXPECT_EQ(t.node(static_cast<std::size_t>(t.node(0).left)).label, digitize("neg"));
  EXPECT_TRUE(oracle::same_shape(oracle::reference_lcrs(r).get(), t, 0));
}

TEST(Lcrs, MatchesReferenceOnRandomTrees) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    AstNode r = oracle::random_tree(rng, 1 + rng.index(120));
    BinTree t = binarize_lcrs(r);
    EXPECT_EQ(t.size(), oracle::count(r));
    EXPECT_TRUE(oracle::same_shape(oracle::reference_lcrs(r).get(), t, 0));
    EXPECT_EQ(oracle::unbinarize(t), oracle::canonical_kinds(r));
  }
}

TEST(Lcrs, PostOrderVisitsChildrenFirst) {
  Rng rng(12);
  AstNode r = oracle::random_tree(rng, 80);
  BinTree t = binarize_lcrs(r);
  std::vector<int> seen(t.size(), 0);
  for (auto idx : t.post_order()) {
    const auto& n = t.node(static_cast<std::size_t>(idx));
    if (n.left >= 0) {
      EXPECT_TRUE(seen[static_cast<std::size_t>(n.left)]);
    }
    if (n.right >= 0) {
      EXPECT_TRUE(seen[static_cast<std::size_t>(n.right)]);
    }
    seen[static_cast<std::size_t>(idx)] = 1;
  }
  EXPECT_EQ(t.post_order().back(), 0);
}

TEST(Lcrs, DeepChainDoesNotRecurse) {
  AstNode r("block");
  AstNode* cur = &r;
  for (int i = 0; i < 100000; ++i) {
    cur->children.emplace_back("neg");
    cur = &cur->children.back();
  }
  BinTree t = binarize_lcrs(r);
  EXPECT_EQ(t.size(), 100001u);
  // Let the chain unwind without deep recursion in the destructor.
  std::vector<AstNode> pending;
  pending.push_back(std::move(r));
  while (!pending.empty()) {
    AstNode n = std::move(pending.back());
    pending.pop_back();
    for (auto& c : n.children) pending.push_back(std::move(c));
    n.children.clear();
  }
}

TEST(BinTreeCtor, RejectsMalformedLinks) {
  using N = BinTree::Node;
  EXPECT_THROW(BinTree(std::vector<N>{}), SchemaError);
  EXPECT_THROW(BinTree(std::vector<N>{{1, 0, -1}}), SchemaError);
  EXPECT_THROW(BinTree(std::vector<N>{{1, 1, 1}, {2, -1, -1}}), SchemaError);
  EXPECT_THROW(BinTree(std::vector<N>{{1, 2, -1}}), SchemaError);
  EXPECT_THROW(BinTree(std::vector<N>{{0, -1, -1}}), SchemaError);
  EXPECT_THROW(BinTree(std::vector<N>{{1, -1, -1}, {2, -1, -1}}), SchemaError);
  EXPECT_NO_THROW(BinTree(std::vector<N>{{1, 1, -1}, {2, -1, -1}}));
}

TEST(Validate, MinimumNodeBoundary) {
  FunctionAst three{"f", "", "x86", node("block", {leaf("var"), leaf("num")}), {}};
  EXPECT_TRUE(validate(three).too_small);
  EXPECT_FALSE(validate(three).ok());
  FunctionAst five{"f", "", "x86",
                   node("block", {node("return", {node("add", {leaf("var"), leaf("num")})})}),
                   {}};
  auto report = validate(five);
  EXPECT_EQ(report.node_count, 5u);
  EXPECT_FALSE(report.too_small);
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.depth, 4u);
  EXPECT_EQ(report.statement_nodes, 2u);
  EXPECT_EQ(report.expression_nodes, 3u);
}

TEST(Validate, AsmAndUnknownKinds) {
  FunctionAst f{"f", "", "x86",
                node("block", {leaf("asm"), leaf("vshuf"), leaf("var"), leaf("var")}), {}};
  auto report = validate(f);
  EXPECT_EQ(report.label_histogram[43], 2u);
  EXPECT_EQ(report.unknown_kinds, std::set<std::string>{"vshuf"});
  EXPECT_FALSE(report.too_small);
  EXPECT_TRUE(report.ok());
  f.callees.push_back({"g", -1});
  EXPECT_FALSE(validate(f).ok());
}

TEST(Json, RoundTripRandomFunctions) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    FunctionAst a{"fn" + std::to_string(trial), "lib" + std::to_string(trial % 3), "arm",
                  oracle::random_tree(rng, 1 + rng.index(60)), {}};
    for (std::size_t k = rng.index(4); k > 0; --k) {
      a.callees.push_back({"c" + std::to_string(k), static_cast<std::int64_t>(rng.index(100))});
    }
    std::string text = ast_to_json(a);
    EXPECT_EQ(json_to_ast(text), a);
    EXPECT_EQ(ast_to_json(json_to_ast(text)), text);
  }
}

TEST(Json, CanonicalFieldOrder) {
  FunctionAst a{"f", "o", "x86", node("return", {leaf("num")}), {{"g", 3}}};
  EXPECT_EQ(ast_to_json(a),
            R"({"schema":"ast-v1","name":"f","origin":"o","arch":"x86","callees":[["g",3]],)"
            R"("root":{"k":"return","c":[{"k":"num","c":[]}]}})");
}

TEST(Json, MissingRootNamesField) {
  const std::string text = R"({"schema":"ast-v1","name":"f","origin":"","arch":"x86","callees":[]})";
  try {
    json_to_ast(text);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("\"root\""), std::string::npos);
  }
}

TEST(Json, SchemaVersionMismatch) {
  const std::string text =
      R"({"schema":"ast-v2","name":"f","origin":"","arch":"x86","callees":[],"root":{"k":"num","c":[]}})";
  EXPECT_THROW(json_to_ast(text), SchemaError);
}

TEST(Json, BadCallees) {
  const char* base = R"({"schema":"ast-v1","name":"f","origin":"","arch":"x86","root":{"k":"num","c":[]},)";
  EXPECT_THROW(json_to_ast(std::string(base) + R"("callees":[["g",-2]]})"), SchemaError);
  EXPECT_THROW(json_to_ast(std::string(base) + R"("callees":[["g",1.5]]})"), SchemaError);
  EXPECT_THROW(json_to_ast(std::string(base) + R"("callees":[["g"]]})"), SchemaError);
  EXPECT_THROW(json_to_ast(std::string(base) + R"("callees":{}})"), SchemaError);
}

TEST(Json, MalformedTextReportsPosition) {
  const std::string text = "{\"schema\":\"ast-v1\",\n  \"name\": ,}";
  try {
    json_to_ast(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 11u);
  }
}

TEST(Json, JsonlReportsLineNumber) {
  FunctionAst a{"f", "", "x86", node("return", {leaf("num")}), {}};
  std::stringstream in;
  in << ast_to_json(a) << "\n\n" << ast_to_json(a) << "\n{\"schema\":\"ast-v1\"}\n";
  try {
    read_ast_jsonl(in);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
  std::stringstream bad("\n\n{oops}\n");
  try {
    read_ast_jsonl(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Json, HistsizesetfnFixture) {
  auto asts = read_ast_jsonl_file(ASTSIM_FIXTURE_DIR "/histsizesetfn.json");
  ASSERT_EQ(asts.size(), 1u);
  const FunctionAst& f = asts.front();
  EXPECT_EQ(f.name, "histsizesetfn");
  EXPECT_EQ(f.arch, "x86");
  // Counted by hand from the fixture.
  EXPECT_EQ(node_count(f.root), 23u);
  EXPECT_EQ(tree_depth(f.root), 5u);
  auto report = validate(f);
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.label_histogram[static_cast<std::size_t>(digitize("if"))], 2u);
  EXPECT_EQ(report.label_histogram[static_cast<std::size_t>(digitize("return"))], 1u);
  EXPECT_EQ(report.label_histogram[static_cast<std::size_t>(digitize("call"))], 2u);
  EXPECT_EQ(report.label_histogram[static_cast<std::size_t>(digitize("var"))], 6u);
  EXPECT_TRUE(report.unknown_kinds.empty());
  ASSERT_EQ(f.callees.size(), 2u);
  EXPECT_EQ(f.callees[1], (Callee{"zfree", 0}));
}

}  // namespace
}  // namespace astsim
