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

// Non-learned AST similarity baselines: Diaphora-style prime-product
// hashing and Zhang-Shasha tree edit distance.

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "astsim/ast.hpp"
#include "astsim/error.hpp"

namespace astsim {

// The i-th prime for label i (label 1 -> 2).
inline std::uint32_t label_prime(int label) {
  static const std::array<std::uint32_t, kNumLabels> kPrimes = [] {
    std::array<std::uint32_t, kNumLabels> out{};
    std::size_t found = 0;
    for (std::uint32_t c = 2; found < out.size(); ++c) {
      bool prime = true;
      for (std::uint32_t d = 2; d * d <= c; ++d) {
        if (c % d == 0) {
          prime = false;
          break;
        }
      }
      if (prime) out[found++] = c;
    }
    return out;
  }();
  if (label < 1 || label > kNumLabels) throw DomainError("label out of range");
  return kPrimes[static_cast<std::size_t>(label - 1)];
}

// Prime factorization of the AST's prime product, sorted ascending.
inline std::vector<std::uint32_t> prime_signature(const AstNode& root) {
  std::vector<std::uint32_t> out;
  for_each_node(root, [&](const AstNode& n, std::size_t) { out.push_back(label_prime(n.label())); });
  std::sort(out.begin(), out.end());
  return out;
}

// 2 * |shared prime factors| / (|t1| + |t2|), factors counted with
// multiplicity.
inline double diaphora_similarity(const AstNode& t1, const AstNode& t2) {
  auto a = prime_signature(t1);
  auto b = prime_signature(t2);
  std::vector<std::uint32_t> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return 2.0 * static_cast<double>(common.size()) / static_cast<double>(a.size() + b.size());
}

inline double diaphora_similarity(const FunctionAst& t1, const FunctionAst& t2) {
  return diaphora_similarity(t1.root, t2.root);
}

inline constexpr std::size_t kDefaultTedCap = 300;

namespace detail {

struct PostorderTree {
  std::vector<int> labels;    // 1-based, index 0 unused
  std::vector<std::size_t> lml;  // leftmost leaf descendant, 1-based
  std::vector<std::size_t> keyroots;
};

inline PostorderTree postorder_tree(const AstNode& root) {
  PostorderTree t;
  t.labels.push_back(0);
  t.lml.push_back(0);
  struct Frame {
    const AstNode* node;
    std::size_t next_child;
    std::size_t first_leaf;
  };
  std::vector<Frame> stack{{&root, 0, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_child < f.node->children.size()) {
      const AstNode* child = &f.node->children[f.next_child++];
      stack.push_back({child, 0, 0});
      continue;
    }
    t.labels.push_back(f.node->label());
    std::size_t index = t.labels.size() - 1;
    std::size_t lml = f.first_leaf == 0 ? index : f.first_leaf;
    t.lml.push_back(lml);
    stack.pop_back();
    if (!stack.empty() && stack.back().first_leaf == 0) stack.back().first_leaf = lml;
  }
  const std::size_t n = t.labels.size() - 1;
  std::vector<char> seen(n + 1, 0);
  for (std::size_t i = n; i >= 1; --i) {
    if (!seen[t.lml[i]]) {
      t.keyroots.push_back(i);
      seen[t.lml[i]] = 1;
    }
  }
  std::sort(t.keyroots.begin(), t.keyroots.end());
  return t;
}

}  // namespace detail

// Ordered tree edit distance with unit insert/delete/relabel costs
// (Zhang-Shasha). Node labels are compared after digitization.
inline std::size_t tree_edit_distance(const AstNode& t1, const AstNode& t2,
                                      std::size_t cap = kDefaultTedCap) {
  const std::size_t n1 = node_count(t1), n2 = node_count(t2);
  if (n1 > cap || n2 > cap) {
    throw DomainError("tree edit distance: tree exceeds size cap of " + std::to_string(cap));
  }
  const auto a = detail::postorder_tree(t1);
  const auto b = detail::postorder_tree(t2);
  std::vector<std::size_t> td((n1 + 1) * (n2 + 1), 0);
  auto tree_dist = [&](std::size_t i, std::size_t j) -> std::size_t& { return td[i * (n2 + 1) + j]; };
  std::vector<std::size_t> fd;

  for (std::size_t i : a.keyroots) {
    for (std::size_t j : b.keyroots) {
      const std::size_t li = a.lml[i], lj = b.lml[j];
      const std::size_t rows = i - li + 2, cols = j - lj + 2;
      fd.assign(rows * cols, 0);
      auto forest = [&](std::size_t x, std::size_t y) -> std::size_t& { return fd[x * cols + y]; };
      // forest(x, y) is the distance between a[li..li+x-1] and b[lj..lj+y-1].
      for (std::size_t x = 1; x < rows; ++x) forest(x, 0) = x;
      for (std::size_t y = 1; y < cols; ++y) forest(0, y) = y;
      for (std::size_t x = 1; x < rows; ++x) {
        const std::size_t di = li + x - 1;
        for (std::size_t y = 1; y < cols; ++y) {
          const std::size_t dj = lj + y - 1;
          const std::size_t del = forest(x - 1, y) + 1;
          const std::size_t ins = forest(x, y - 1) + 1;
          if (a.lml[di] == li && b.lml[dj] == lj) {
            const std::size_t rel = forest(x - 1, y - 1) + (a.labels[di] == b.labels[dj] ? 0 : 1);
            forest(x, y) = std::min({del, ins, rel});
            tree_dist(di, dj) = forest(x, y);
          } else {
            const std::size_t px = a.lml[di] - li, py = b.lml[dj] - lj;
            forest(x, y) = std::min({del, ins, forest(px, py) + tree_dist(di, dj)});
          }
        }
      }
    }
  }
  return tree_dist(n1, n2);
}

// 1 - TED / (|t1| + |t2|), in [0, 1].
inline double tree_edit_similarity(const AstNode& t1, const AstNode& t2,
                                   std::size_t cap = kDefaultTedCap) {
  const double ted = static_cast<double>(tree_edit_distance(t1, t2, cap));
  return 1.0 - ted / static_cast<double>(node_count(t1) + node_count(t2));
}

}  // namespace astsim
