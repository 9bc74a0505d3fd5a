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

// The AST data model: node-kind alphabet, digitization, validation and the
// left-child right-sibling (LCRS) binarization consumed by the encoder.

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "astsim/error.hpp"

namespace astsim {

// Size of the label alphabet. Labels are 1-based.
inline constexpr int kNumLabels = 43;
inline constexpr int kOtherLabel = 43;
// Functions with fewer nodes are dropped from datasets.
inline constexpr std::size_t kMinNodes = 5;

enum class KindClass { kStatement, kExpression };

struct KindInfo {
  std::string_view name;
  int label;
  KindClass cls;
};

// Label table. Statements 1-9, assignments 10-17, comparisons 18-23,
// arithmetic 24-34, others 35-43. "asm" shares 43 with every unknown kind.
inline constexpr std::array<KindInfo, kNumLabels> kKindTable = {{
    {"if", 1, KindClass::kStatement},
    {"block", 2, KindClass::kStatement},
    {"for", 3, KindClass::kStatement},
    {"while", 4, KindClass::kStatement},
    {"switch", 5, KindClass::kStatement},
    {"return", 6, KindClass::kStatement},
    {"goto", 7, KindClass::kStatement},
    {"continue", 8, KindClass::kStatement},
    {"break", 9, KindClass::kStatement},
    {"asg", 10, KindClass::kExpression},
    {"asgor", 11, KindClass::kExpression},
    {"asgxor", 12, KindClass::kExpression},
    {"asgand", 13, KindClass::kExpression},
    {"asgadd", 14, KindClass::kExpression},
    {"asgsub", 15, KindClass::kExpression},
    {"asgmul", 16, KindClass::kExpression},
    {"asgdiv", 17, KindClass::kExpression},
    {"eq", 18, KindClass::kExpression},
    {"ne", 19, KindClass::kExpression},
    {"gt", 20, KindClass::kExpression},
    {"lt", 21, KindClass::kExpression},
    {"ge", 22, KindClass::kExpression},
    {"le", 23, KindClass::kExpression},
    {"or", 24, KindClass::kExpression},
    {"xor", 25, KindClass::kExpression},
    {"add", 26, KindClass::kExpression},
    {"sub", 27, KindClass::kExpression},
    {"mul", 28, KindClass::kExpression},
    {"div", 29, KindClass::kExpression},
    {"not", 30, KindClass::kExpression},
    {"postinc", 31, KindClass::kExpression},
    {"postdec", 32, KindClass::kExpression},
    {"preinc", 33, KindClass::kExpression},
    {"predec", 34, KindClass::kExpression},
    {"and", 35, KindClass::kExpression},
    {"mod", 36, KindClass::kExpression},
    {"neg", 37, KindClass::kExpression},
    {"idx", 38, KindClass::kExpression},
    {"var", 39, KindClass::kExpression},
    {"num", 40, KindClass::kExpression},
    {"call", 41, KindClass::kExpression},
    {"str", 42, KindClass::kExpression},
    {"asm", 43, KindClass::kExpression},
}};

// Maps a kind name to its label. Total: unrecognized names map to 43.
constexpr int digitize(std::string_view kind) {
  for (const auto& info : kKindTable) {
    if (info.name == kind) return info.label;
  }
  return kOtherLabel;
}

constexpr bool is_known_kind(std::string_view kind) {
  for (const auto& info : kKindTable) {
    if (info.name == kind) return true;
  }
  return false;
}

// Canonical name for a label; labels outside 1..43 yield "asm".
constexpr std::string_view kind_name(int label) {
  if (label < 1 || label > kNumLabels) return kKindTable.back().name;
  return kKindTable[static_cast<std::size_t>(label - 1)].name;
}

constexpr KindClass kind_class(std::string_view kind) {
  for (const auto& info : kKindTable) {
    if (info.name == kind) return info.cls;
  }
  return KindClass::kExpression;
}

// One AST vertex. Kinds are kept as the producer wrote them so that
// exporter output round-trips verbatim; digitize() maps them to labels.
struct AstNode {
  std::string kind;
  std::vector<AstNode> children;

  AstNode() = default;
  explicit AstNode(std::string k, std::vector<AstNode> c = {})
      : kind(std::move(k)), children(std::move(c)) {}

  int label() const { return digitize(kind); }
  bool is_leaf() const { return children.empty(); }

  friend bool operator==(const AstNode&, const AstNode&) = default;
};

struct Callee {
  std::string name;
  // Instruction-count proxy used by the inlining filter.
  std::int64_t size = 0;

  friend bool operator==(const Callee&, const Callee&) = default;
};

struct FunctionAst {
  std::string name;
  std::string origin;
  std::string arch;
  AstNode root;
  std::vector<Callee> callees;

  friend bool operator==(const FunctionAst&, const FunctionAst&) = default;
};

// Visits every node in preorder without recursion. The visitor receives the
// node and its depth (root = 1).
template <typename Visitor>
void for_each_node(const AstNode& root, Visitor&& visit) {
  std::vector<std::pair<const AstNode*, std::size_t>> stack{{&root, 1}};
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    visit(*node, depth);
    for (auto it = node->children.rbegin(); it != node->children.rend(); ++it) {
      stack.emplace_back(&*it, depth + 1);
    }
  }
}

inline std::size_t node_count(const AstNode& root) {
  std::size_t count = 0;
  for_each_node(root, [&](const AstNode&, std::size_t) { ++count; });
  return count;
}

inline std::size_t tree_depth(const AstNode& root) {
  std::size_t depth = 0;
  for_each_node(root, [&](const AstNode&, std::size_t d) {
    depth = std::max(depth, d);
  });
  return depth;
}

// Labels of all nodes in preorder.
inline std::vector<int> labels_of(const AstNode& root) {
  std::vector<int> labels;
  for_each_node(root,
                [&](const AstNode& n, std::size_t) { labels.push_back(n.label()); });
  return labels;
}

// Binarized, digitized tree stored as a flat node array. Node 0 is the root;
// left/right are indices into the array or -1 when absent.
class BinTree {
 public:
  struct Node {
    int label = kOtherLabel;
    std::int32_t left = -1;
    std::int32_t right = -1;

    friend bool operator==(const Node&, const Node&) = default;
  };

  BinTree() = default;

  // Takes ownership of an already-linked node array and checks it is a tree
  // rooted at 0 with labels in range.
  explicit BinTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw SchemaError("BinTree must have at least one node");
    check_structure();
    compute_post_order();
  }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Node>& nodes() const { return nodes_; }

  // Children before parents; the root comes last.
  const std::vector<std::int32_t>& post_order() const { return post_order_; }

  friend bool operator==(const BinTree& a, const BinTree& b) {
    return a.nodes_ == b.nodes_;
  }

 private:
  void check_structure() const {
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<std::int32_t> stack{0};
    std::size_t visited = 0;
    while (!stack.empty()) {
      auto i = stack.back();
      stack.pop_back();
      if (seen[static_cast<std::size_t>(i)]) {
        throw SchemaError("BinTree node reachable twice");
      }
      seen[static_cast<std::size_t>(i)] = 1;
      ++visited;
      const Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.label < 1 || n.label > kNumLabels) {
        throw SchemaError("BinTree label out of range: " + std::to_string(n.label));
      }
      for (auto child : {n.left, n.right}) {
        if (child == -1) continue;
        if (child < 0 || static_cast<std::size_t>(child) >= nodes_.size()) {
          throw SchemaError("BinTree link out of range");
        }
        stack.push_back(child);
      }
    }
    if (visited != nodes_.size()) throw SchemaError("BinTree has unreachable nodes");
  }

  void compute_post_order() {
    post_order_.clear();
    post_order_.reserve(nodes_.size());
    // Reverse of a root-right-left preorder is a left-right-root postorder.
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
      auto i = stack.back();
      stack.pop_back();
      post_order_.push_back(i);
      const Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.left != -1) stack.push_back(n.left);
      if (n.right != -1) stack.push_back(n.right);
    }
    std::reverse(post_order_.begin(), post_order_.end());
  }

  std::vector<Node> nodes_;
  std::vector<std::int32_t> post_order_;
};

// Left-child right-sibling transform: each node's first child becomes its
// left link and its next sibling becomes its right link.
inline BinTree binarize_lcrs(const AstNode& root) {
  std::vector<BinTree::Node> nodes;
  nodes.push_back({root.label(), -1, -1});
  std::vector<std::pair<const AstNode*, std::int32_t>> stack{{&root, 0}};
  while (!stack.empty()) {
    auto [src, index] = stack.back();
    stack.pop_back();
    std::int32_t prev = -1;
    for (const AstNode& child : src->children) {
      auto child_index = static_cast<std::int32_t>(nodes.size());
      nodes.push_back({child.label(), -1, -1});
      if (prev == -1) {
        nodes[static_cast<std::size_t>(index)].left = child_index;
      } else {
        nodes[static_cast<std::size_t>(prev)].right = child_index;
      }
      prev = child_index;
      stack.emplace_back(&child, child_index);
    }
  }
  return BinTree(std::move(nodes));
}

struct ValidationReport {
  std::size_t node_count = 0;
  std::size_t depth = 0;
  bool too_small = false;
  std::size_t statement_nodes = 0;
  std::size_t expression_nodes = 0;
  // Node count per label, index 0 unused.
  std::array<std::size_t, kNumLabels + 1> label_histogram{};
  // Distinct kind names that are not in the table (they count as label 43).
  std::set<std::string> unknown_kinds;
  std::vector<std::string> callee_errors;

  bool ok() const { return !too_small && callee_errors.empty(); }
};

inline ValidationReport validate(const FunctionAst& ast) {
  ValidationReport report;
  for_each_node(ast.root, [&](const AstNode& n, std::size_t depth) {
    ++report.node_count;
    report.depth = std::max(report.depth, depth);
    ++report.label_histogram[static_cast<std::size_t>(n.label())];
    if (!is_known_kind(n.kind)) report.unknown_kinds.insert(n.kind);
    if (kind_class(n.kind) == KindClass::kStatement) {
      ++report.statement_nodes;
    } else {
      ++report.expression_nodes;
    }
  });
  report.too_small = report.node_count < kMinNodes;
  for (const Callee& c : ast.callees) {
    if (c.size < 0) {
      report.callee_errors.push_back("negative size for callee " + c.name);
    }
  }
  return report;
}

}  // namespace astsim
