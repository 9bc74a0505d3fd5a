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

// AST JSON schema v1, shared with the decompiler export plugin:
//
//   {"schema":"ast-v1","name":str,"origin":str,"arch":str,
//    "callees":[[str,int],...],"root":node}
//   node = {"k":str,"c":[node,...]}
//
// Output is canonical: keys in the order above, no whitespace, no floats.

#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "astsim/ast.hpp"
#include "astsim/error.hpp"
#include "json.hpp"

namespace astsim {

inline constexpr std::string_view kAstSchema = "ast-v1";

using Json = nlohmann::ordered_json;

namespace detail {

// Converts a byte offset into a 1-based (line, column) pair.
inline std::pair<std::size_t, std::size_t> line_col(std::string_view text,
                                                    std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline Json parse_json_text(std::string_view text, std::size_t line_offset = 0) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed JSON: " + std::string(e.what()),
                     line + line_offset, col);
  }
}

inline const Json& require(const Json& obj, const char* field) {
  if (!obj.is_object()) throw SchemaError("expected a JSON object");
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw SchemaError(std::string("missing field \"") + field + "\"");
  }
  return *it;
}

inline std::string require_string(const Json& obj, const char* field) {
  const Json& v = require(obj, field);
  if (!v.is_string()) {
    throw SchemaError(std::string("field \"") + field + "\" must be a string");
  }
  return v.get<std::string>();
}

}  // namespace detail

inline Json node_to_json(const AstNode& node) {
  Json children = Json::array();
  for (const AstNode& c : node.children) children.push_back(node_to_json(c));
  Json out = Json::object();
  out["k"] = node.kind;
  out["c"] = std::move(children);
  return out;
}

inline AstNode json_to_node(const Json& j) {
  AstNode node;
  node.kind = detail::require_string(j, "k");
  const Json& children = detail::require(j, "c");
  if (!children.is_array()) throw SchemaError("field \"c\" must be an array");
  node.children.reserve(children.size());
  for (const Json& c : children) node.children.push_back(json_to_node(c));
  return node;
}

inline Json ast_to_json_value(const FunctionAst& ast) {
  Json callees = Json::array();
  for (const Callee& c : ast.callees) callees.push_back(Json::array({c.name, c.size}));
  Json out = Json::object();
  out["schema"] = kAstSchema;
  out["name"] = ast.name;
  out["origin"] = ast.origin;
  out["arch"] = ast.arch;
  out["callees"] = std::move(callees);
  out["root"] = node_to_json(ast.root);
  return out;
}

inline std::string ast_to_json(const FunctionAst& ast) {
  return ast_to_json_value(ast).dump();
}

inline FunctionAst json_value_to_ast(const Json& j) {
  std::string schema = detail::require_string(j, "schema");
  if (schema != kAstSchema) {
    throw SchemaError("unsupported schema \"" + schema + "\", expected \"" +
                      std::string(kAstSchema) + "\"");
  }
  FunctionAst ast;
  ast.name = detail::require_string(j, "name");
  ast.origin = detail::require_string(j, "origin");
  ast.arch = detail::require_string(j, "arch");
  const Json& callees = detail::require(j, "callees");
  if (!callees.is_array()) throw SchemaError("field \"callees\" must be an array");
  for (const Json& c : callees) {
    if (!c.is_array() || c.size() != 2 || !c[0].is_string() ||
        !c[1].is_number_integer()) {
      throw SchemaError("callee entries must be [name, count] pairs");
    }
    Callee callee{c[0].get<std::string>(), c[1].get<std::int64_t>()};
    if (callee.size < 0) throw SchemaError("callee count must be nonnegative");
    ast.callees.push_back(std::move(callee));
  }
  ast.root = json_to_node(detail::require(j, "root"));
  return ast;
}

inline FunctionAst json_to_ast(std::string_view text) {
  return json_value_to_ast(detail::parse_json_text(text));
}

// Reads a JSONL stream of AST objects. Blank lines are skipped. Errors carry
// the line number within the stream.
inline std::vector<FunctionAst> read_ast_jsonl(std::istream& in) {
  std::vector<FunctionAst> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = detail::parse_json_text(line, lineno - 1);
    try {
      out.push_back(json_value_to_ast(j));
    } catch (const SchemaError& e) {
      throw SchemaError(std::string(e.what()) + " (line " + std::to_string(lineno) + ")");
    }
  }
  return out;
}

inline std::vector<FunctionAst> read_ast_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_ast_jsonl(in);
}

inline void write_ast_jsonl(std::ostream& out, const std::vector<FunctionAst>& asts) {
  for (const FunctionAst& a : asts) out << ast_to_json(a) << '\n';
}

}  // namespace astsim
