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

// Recursive-descent frontend for a small C-like language. It produces ASTs
// shaped like decompiler output: a function is a "block" of statements,
// expressions become operator nodes, and literal values are dropped.
//
//   program  := { "fn" IDENT "(" [IDENT {"," IDENT}] ")" block }
//   block    := "{" { stmt } "}"
//   stmt     := "if" "(" expr ")" block ["else" (block | if-stmt)]
//             | "while" "(" expr ")" block
//             | "for" "(" [expr] ";" [expr] ";" [expr] ")" block
//             | "switch" "(" expr ")" "{" { ("case" NUM | "default") ":" {stmt} } "}"
//             | "return" [expr] ";" | "break" ";" | "continue" ";"
//             | "goto" IDENT ";" | IDENT ":" | block | expr ";"
//   expr     := C precedence: assignment, ||, &&, |, ^, &, equality,
//               relational, shift, additive, multiplicative, unary, postfix
//   primary  := IDENT | NUM | STRING | "asm" "(" STRING ")" | "(" expr ")"

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "astsim/ast.hpp"
#include "astsim/error.hpp"

namespace astsim {

namespace mini {

enum class Tok { kIdent, kNumber, kString, kPunct, kKeyword, kEnd };

struct Token {
  Tok type = Tok::kEnd;
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
};

inline bool is_keyword(std::string_view s) {
  static const std::set<std::string_view> kKeywords = {
      "fn",     "if",   "else",    "while",    "for",  "switch", "case",
      "default", "return", "break", "continue", "goto", "asm"};
  return kKeywords.count(s) != 0;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          t.text += advance();
        }
        t.type = is_keyword(t.text) ? Tok::kKeyword : Tok::kIdent;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
          t.text += advance();
        }
        t.type = Tok::kNumber;
      } else if (c == '"') {
        advance();
        while (pos_ < src_.size() && src_[pos_] != '"') {
          if (src_[pos_] == '\n') break;
          if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) t.text += advance();
          t.text += advance();
        }
        if (pos_ >= src_.size() || src_[pos_] != '"') {
          throw ParseError("unterminated string literal", t.line, t.column);
        }
        advance();
        t.type = Tok::kString;
      } else {
        static const std::vector<std::string_view> kPuncts = {
            "<<=", ">>=", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=",
            "-=",  "*=",  "/=", "%=", "|=", "^=", "&=", "<<", ">>", "(",  ")",
            "{",   "}",   "[",  "]",  ";",  ",",  ":",  "=",  "<",  ">",  "+",
            "-",   "*",   "/",  "%",  "|",  "^",  "&",  "!",  "~"};
        bool matched = false;
        for (std::string_view p : kPuncts) {
          if (src_.substr(pos_, p.size()) == p) {
            for (std::size_t i = 0; i < p.size(); ++i) t.text += advance();
            matched = true;
            break;
          }
        }
        if (!matched) {
          throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.column);
        }
        t.type = Tok::kPunct;
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        std::size_t line = line_, col = col_;
        advance();
        advance();
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= src_.size()) throw ParseError("unterminated comment", line, col);
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

struct ParsedFunction {
  std::string name;
  AstNode body;
  // Distinct callee names in order of first call.
  std::vector<std::string> calls;
  std::size_t line = 0;
  std::size_t column = 0;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  std::vector<ParsedFunction> parse_program() {
    std::vector<ParsedFunction> out;
    while (peek().type != Tok::kEnd) out.push_back(parse_function());
    return out;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }

  bool at(std::string_view text) const {
    const Token& t = peek();
    return (t.type == Tok::kPunct || t.type == Tok::kKeyword) && t.text == text;
  }

  bool accept(std::string_view text) {
    if (!at(text)) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.type == Tok::kEnd ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + ", found " + found, t.line, t.column);
  }

  void expect(std::string_view text) {
    if (!accept(text)) fail("expected '" + std::string(text) + "'");
  }

  Token expect_ident() {
    if (peek().type != Tok::kIdent) fail("expected identifier");
    return toks_[pos_++];
  }

  ParsedFunction parse_function() {
    ParsedFunction fn;
    expect("fn");
    Token name = expect_ident();
    fn.name = name.text;
    fn.line = name.line;
    fn.column = name.column;
    expect("(");
    if (!at(")")) {
      expect_ident();
      while (accept(",")) expect_ident();
    }
    expect(")");
    calls_.clear();
    fn.body = parse_block();
    fn.calls = calls_;
    return fn;
  }

  AstNode parse_block() {
    expect("{");
    AstNode block("block");
    while (!at("}")) {
      if (peek().type == Tok::kEnd) fail("expected '}'");
      if (auto stmt = parse_statement(); !stmt.kind.empty()) {
        block.children.push_back(std::move(stmt));
      }
    }
    expect("}");
    return block;
  }

  // Returns a node with an empty kind for statements that emit nothing
  // (goto labels).
  AstNode parse_statement() {
    if (accept("if")) return parse_if_rest();
    if (accept("while")) {
      expect("(");
      AstNode cond = parse_expr();
      expect(")");
      return AstNode("while", {std::move(cond), parse_block()});
    }
    if (accept("for")) {
      AstNode node("for");
      expect("(");
      if (!at(";")) node.children.push_back(parse_expr());
      expect(";");
      if (!at(";")) node.children.push_back(parse_expr());
      expect(";");
      if (!at(")")) node.children.push_back(parse_expr());
      expect(")");
      node.children.push_back(parse_block());
      return node;
    }
    if (accept("switch")) return parse_switch_rest();
    if (accept("return")) {
      AstNode node("return");
      if (!at(";")) node.children.push_back(parse_expr());
      expect(";");
      return node;
    }
    if (accept("break")) {
      expect(";");
      return AstNode("break");
    }
    if (accept("continue")) {
      expect(";");
      return AstNode("continue");
    }
    if (accept("goto")) {
      expect_ident();
      expect(";");
      return AstNode("goto");
    }
    if (at("{")) return parse_block();
    if (peek().type == Tok::kIdent && peek(1).type == Tok::kPunct && peek(1).text == ":") {
      pos_ += 2;
      return AstNode();
    }
    AstNode expr = parse_expr();
    expect(";");
    return expr;
  }

  AstNode parse_if_rest() {
    expect("(");
    AstNode cond = parse_expr();
    expect(")");
    AstNode node("if", {std::move(cond), parse_block()});
    if (accept("else")) {
      if (accept("if")) {
        node.children.push_back(parse_if_rest());
      } else {
        node.children.push_back(parse_block());
      }
    }
    return node;
  }

  AstNode parse_switch_rest() {
    expect("(");
    AstNode node("switch", {parse_expr()});
    expect(")");
    expect("{");
    while (!accept("}")) {
      AstNode arm("block");
      if (accept("case")) {
        if (peek().type != Tok::kNumber) fail("expected case value");
        ++pos_;
        arm.children.emplace_back("num");
      } else if (!accept("default")) {
        fail("expected 'case' or 'default'");
      }
      expect(":");
      while (!at("case") && !at("default") && !at("}")) {
        if (peek().type == Tok::kEnd) fail("expected '}'");
        if (auto stmt = parse_statement(); !stmt.kind.empty()) {
          arm.children.push_back(std::move(stmt));
        }
      }
      node.children.push_back(std::move(arm));
    }
    return node;
  }

  AstNode parse_expr() { return parse_assignment(); }

  AstNode parse_assignment() {
    static const std::map<std::string_view, std::string_view> kAssignOps = {
        {"=", "asg"},      {"|=", "asgor"},   {"^=", "asgxor"}, {"&=", "asgand"},
        {"+=", "asgadd"},  {"-=", "asgsub"},  {"*=", "asgmul"}, {"/=", "asgdiv"},
        {"%=", "asgmod"},  {"<<=", "asgshl"}, {">>=", "asgshr"}};
    AstNode lhs = parse_binary(0);
    if (peek().type == Tok::kPunct) {
      auto it = kAssignOps.find(peek().text);
      if (it != kAssignOps.end()) {
        ++pos_;
        AstNode rhs = parse_assignment();
        return AstNode(std::string(it->second), {std::move(lhs), std::move(rhs)});
      }
    }
    return lhs;
  }

  // Precedence climbing over the left-associative binary operators.
  AstNode parse_binary(int level) {
    static const std::vector<std::map<std::string_view, std::string_view>> kLevels = {
        {{"||", "lor"}},
        {{"&&", "land"}},
        {{"|", "or"}},
        {{"^", "xor"}},
        {{"&", "and"}},
        {{"==", "eq"}, {"!=", "ne"}},
        {{"<", "lt"}, {">", "gt"}, {"<=", "le"}, {">=", "ge"}},
        {{"<<", "shl"}, {">>", "shr"}},
        {{"+", "add"}, {"-", "sub"}},
        {{"*", "mul"}, {"/", "div"}, {"%", "mod"}},
    };
    if (static_cast<std::size_t>(level) == kLevels.size()) return parse_unary();
    AstNode lhs = parse_binary(level + 1);
    const auto& ops = kLevels[static_cast<std::size_t>(level)];
    while (peek().type == Tok::kPunct) {
      auto it = ops.find(peek().text);
      if (it == ops.end()) break;
      ++pos_;
      AstNode rhs = parse_binary(level + 1);
      lhs = AstNode(std::string(it->second), {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  AstNode parse_unary() {
    static const std::map<std::string_view, std::string_view> kUnary = {
        {"-", "neg"}, {"~", "not"}, {"!", "lnot"}, {"++", "preinc"}, {"--", "predec"}};
    if (peek().type == Tok::kPunct) {
      auto it = kUnary.find(peek().text);
      if (it != kUnary.end()) {
        ++pos_;
        return AstNode(std::string(it->second), {parse_unary()});
      }
    }
    return parse_postfix();
  }

  AstNode parse_postfix() {
    AstNode node = parse_primary();
    for (;;) {
      if (accept("[")) {
        AstNode index = parse_expr();
        expect("]");
        node = AstNode("idx", {std::move(node), std::move(index)});
      } else if (accept("++")) {
        node = AstNode("postinc", {std::move(node)});
      } else if (accept("--")) {
        node = AstNode("postdec", {std::move(node)});
      } else {
        return node;
      }
    }
  }

  AstNode parse_primary() {
    const Token& t = peek();
    switch (t.type) {
      case Tok::kIdent: {
        std::string name = t.text;
        ++pos_;
        if (accept("(")) {
          AstNode call("call");
          if (!at(")")) {
            call.children.push_back(parse_expr());
            while (accept(",")) call.children.push_back(parse_expr());
          }
          expect(")");
          if (std::find(calls_.begin(), calls_.end(), name) == calls_.end()) {
            calls_.push_back(name);
          }
          return call;
        }
        return AstNode("var");
      }
      case Tok::kNumber:
        ++pos_;
        return AstNode("num");
      case Tok::kString:
        ++pos_;
        return AstNode("str");
      default:
        break;
    }
    if (accept("asm")) {
      expect("(");
      if (peek().type != Tok::kString) fail("expected string in asm()");
      ++pos_;
      expect(")");
      return AstNode("asm");
    }
    if (accept("(")) {
      AstNode inner = parse_expr();
      expect(")");
      return inner;
    }
    fail("expected expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> calls_;
};

}  // namespace mini

// Parses mini-language source into one FunctionAst per definition. Callee
// sizes are the callee's own AST node count, or 0 for functions that are
// not defined in the same source.
inline std::vector<FunctionAst> parse_mini(std::string_view source,
                                           const std::string& origin = "",
                                           const std::string& arch = "src") {
  auto parsed = mini::Parser(mini::Lexer(source).tokenize()).parse_program();
  std::map<std::string, std::size_t> sizes;
  for (const auto& fn : parsed) {
    if (sizes.count(fn.name)) {
      throw ParseError("duplicate function '" + fn.name + "'", fn.line, fn.column);
    }
    sizes[fn.name] = node_count(fn.body);
  }
  std::vector<FunctionAst> out;
  out.reserve(parsed.size());
  for (auto& fn : parsed) {
    FunctionAst ast;
    ast.name = fn.name;
    ast.origin = origin;
    ast.arch = arch;
    ast.root = std::move(fn.body);
    for (const std::string& callee : fn.calls) {
      auto it = sizes.find(callee);
      ast.callees.push_back({callee, it == sizes.end() ? 0 : static_cast<std::int64_t>(it->second)});
    }
    out.push_back(std::move(ast));
  }
  return out;
}

}  // namespace astsim
