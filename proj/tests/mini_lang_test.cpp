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

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "astsim/ast.hpp"
#include "astsim/ast_json.hpp"
#include "astsim/mini_lang.hpp"

namespace astsim {
namespace {

std::multiset<std::string> kinds_of(const AstNode& root) {
  std::multiset<std::string> out;
  for_each_node(root, [&](const AstNode& n, std::size_t) { out.insert(n.kind); });
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TEST(ParseMini, ReturnConstant) {
  auto fns = parse_mini("fn f(){ return 1; }");
  ASSERT_EQ(fns.size(), 1u);
  const AstNode& root = fns[0].root;
  EXPECT_EQ(root, AstNode("block", {AstNode("return", {AstNode("num")})}));
  EXPECT_GE(node_count(root), 3u);
  EXPECT_EQ(fns[0].name, "f");
  EXPECT_EQ(fns[0].arch, "src");
}

TEST(ParseMini, RecursiveFunctionKinds) {
  auto fns = parse_mini("fn g(a){ if(a<2){ return a; } return g(a-1); }");
  ASSERT_EQ(fns.size(), 1u);
  auto kinds = kinds_of(fns[0].root);
  for (const char* k : {"if", "lt", "return", "call", "sub", "var", "num"}) {
    EXPECT_TRUE(kinds.count(k)) << k;
  }
  // block, if, lt, var, num, block, return, var, return, call, sub, var, num
  EXPECT_EQ(kinds.size(), 13u);
  EXPECT_EQ(kinds.count("var"), 3u);
  EXPECT_EQ(kinds.count("return"), 2u);
  ASSERT_EQ(fns[0].callees.size(), 1u);
  EXPECT_EQ(fns[0].callees[0].name, "g");
  EXPECT_EQ(fns[0].callees[0].size, 13);
}

TEST(ParseMini, MissingSemicolonPointsAtToken) {
  try {
    parse_mini("fn h(){ x += 1 }");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 16u);
    EXPECT_NE(std::string(e.what()).find("';'"), std::string::npos);
  }
}

TEST(ParseMini, ErrorsCarryLineAndColumn) {
  try {
    parse_mini("fn a() {\n  return 1;\n}\nfn b() {\n  y = @;\n}\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
    EXPECT_EQ(e.column(), 7u);
  }
  EXPECT_THROW(parse_mini("fn a() { /* never closed"), ParseError);
  EXPECT_THROW(parse_mini("fn a() { s = \"open; }"), ParseError);
  EXPECT_THROW(parse_mini("fn a() { return 1; "), ParseError);
  EXPECT_THROW(parse_mini("fn a() { switch (x) { foo: } }"), ParseError);
}

TEST(ParseMini, DuplicateFunctionName) {
  try {
    parse_mini("fn f() { return 1; }\n\nfn f() { return 2; }");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(ParseMini, StatementShapes) {
  auto fns = parse_mini(R"(
    fn s(a, b) {
      for (i = 0; i < a; i++) { b[i] = -b[i]; }
      for (;;) { break; }
      while (a != 0) { a--; continue; }
      switch (a) {
        case 1: b = 2; break;
        default: b = 3;
      }
      again:
      if (a) { goto again; } else if (b) { a = ~b; } else { a = "x"; }
      asm("nop");
      return;
    })");
  ASSERT_EQ(fns.size(), 1u);
  const auto& body = fns[0].root.children;
  ASSERT_EQ(body.size(), 7u);

  const AstNode& loop = body[0];
  EXPECT_EQ(loop.kind, "for");
  ASSERT_EQ(loop.children.size(), 4u);
  EXPECT_EQ(loop.children[0].kind, "asg");
  EXPECT_EQ(loop.children[1].kind, "lt");
  EXPECT_EQ(loop.children[2].kind, "postinc");
  EXPECT_EQ(loop.children[3].children[0],
            AstNode("asg", {AstNode("idx", {AstNode("var"), AstNode("var")}),
                            AstNode("neg", {AstNode("idx", {AstNode("var"), AstNode("var")})})}));

  EXPECT_EQ(body[1], AstNode("for", {AstNode("block", {AstNode("break")})}));
  EXPECT_EQ(body[2].kind, "while");
  EXPECT_EQ(body[2].children[1].children[0].kind, "postdec");
  EXPECT_EQ(body[2].children[1].children[1].kind, "continue");

  const AstNode& sw = body[3];
  EXPECT_EQ(sw.kind, "switch");
  ASSERT_EQ(sw.children.size(), 3u);
  EXPECT_EQ(sw.children[1].children.size(), 3u);
  EXPECT_EQ(sw.children[1].children[0].kind, "num");
  EXPECT_EQ(sw.children[2].children.size(), 1u);

  const AstNode& branch = body[4];
  EXPECT_EQ(branch.kind, "if");
  ASSERT_EQ(branch.children.size(), 3u);
  EXPECT_EQ(branch.children[1].children[0].kind, "goto");
  EXPECT_EQ(branch.children[2].kind, "if");
  EXPECT_EQ(branch.children[2].children[2].children[0].children[1].kind, "str");

  EXPECT_EQ(body[5].kind, "asm");
  EXPECT_EQ(body[6], AstNode("return"));
}

TEST(ParseMini, PrecedenceAndAssignmentKinds) {
  auto fns = parse_mini(R"(
    fn p(a, b, c) {
      a = b + c * 2;
      a |= b; a ^= b; a &= b; a += b; a -= b; a *= b; a /= b; a %= b;
      a = (b + c) * 2;
      a = b = c;
      return a < b == c;
    })");
  const auto& body = fns[0].root.children;
  EXPECT_EQ(body[0].children[1],
            AstNode("add", {AstNode("var"), AstNode("mul", {AstNode("var"), AstNode("num")})}));
  const char* expected[] = {"asgor", "asgxor", "asgand", "asgadd", "asgsub", "asgmul", "asgdiv"};
  for (int i = 0; i < 7; ++i) EXPECT_EQ(body[static_cast<std::size_t>(1 + i)].kind, expected[i]);
  EXPECT_EQ(body[8].kind, "asgmod");
  EXPECT_EQ(body[8].label(), 43);
  EXPECT_EQ(body[9].children[1].kind, "mul");
  EXPECT_EQ(body[9].children[1].children[0].kind, "add");
  EXPECT_EQ(body[10].children[1].kind, "asg");
  EXPECT_EQ(body[11].children[0].kind, "eq");
  EXPECT_EQ(body[11].children[0].children[0].kind, "lt");
}

TEST(ParseMini, CalleesInFirstCallOrder) {
  auto fns = parse_mini(R"(
    fn leaf(x) { return x + 1; }
    fn top(x) {
      y = ext(x);
      leaf(y);
      z = ext(leaf(x));
      return z;
    })");
  ASSERT_EQ(fns.size(), 2u);
  EXPECT_TRUE(fns[0].callees.empty());
  ASSERT_EQ(fns[1].callees.size(), 2u);
  EXPECT_EQ(fns[1].callees[0], (Callee{"ext", 0}));
  EXPECT_EQ(fns[1].callees[1], (Callee{"leaf", 5}));
}

TEST(ParseMini, EveryNodeIsInTheTaxonomy) {
  auto fns = parse_mini(slurp(ASTSIM_FIXTURE_DIR "/histsizesetfn.mini"), "zsh", "src");
  for (const auto& f : fns) {
    for (int label : labels_of(f.root)) {
      EXPECT_GE(label, 1);
      EXPECT_LE(label, 43);
    }
    EXPECT_TRUE(validate(f).ok());
  }
}

TEST(ParseMini, MatchesHistsizesetfnFixture) {
  auto fns = parse_mini(slurp(ASTSIM_FIXTURE_DIR "/histsizesetfn.mini"), "zsh", "src");
  ASSERT_EQ(fns.size(), 2u);
  auto fixture = read_ast_jsonl_file(ASTSIM_FIXTURE_DIR "/histsizesetfn.json");
  EXPECT_EQ(fns[1].root, fixture[0].root);
  ASSERT_EQ(fns[1].callees.size(), 2u);
  EXPECT_EQ(fns[1].callees[0], (Callee{"resizehistents", 8}));
  EXPECT_EQ(fns[1].callees[1], (Callee{"zfree", 0}));
}

TEST(ParseMini, CommentsAndEmptyInput) {
  EXPECT_TRUE(parse_mini("").empty());
  EXPECT_TRUE(parse_mini("// nothing\n/* at all */").empty());
  auto fns = parse_mini("fn f() { // trailing\n  return /* inline */ 0;\n}");
  EXPECT_EQ(node_count(fns[0].root), 3u);
}

}  // namespace
}  // namespace astsim
