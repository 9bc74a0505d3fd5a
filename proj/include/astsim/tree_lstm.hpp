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

// Binary Tree-LSTM over LCRS trees. For a node with embedding e and child
// states (h_l, c_l), (h_r, c_r):
//
//   f_l = sigmoid(W_f e + U_f_ll h_l + U_f_lr h_r + b_f)
//   f_r = sigmoid(W_f e + U_f_rl h_l + U_f_rr h_r + b_f)
//   i   = sigmoid(W_i e + U_i_l h_l + U_i_r h_r + b_i)
//   o   = sigmoid(W_o e + U_o_l h_l + U_o_r h_r + b_o)
//   u   = tanh(W_u e + U_u_l h_l + U_u_r h_r + b_u)
//   c   = i * u + c_l * f_l + c_r * f_r
//   h   = o * tanh(c)
//
// Absent children contribute constant states (zero unless leaf_state says
// otherwise). The tree encoding is the root's h.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "astsim/ast.hpp"
#include "astsim/error.hpp"
#include "astsim/params.hpp"
#include "astsim/tensor.hpp"

namespace astsim {

struct NodeState {
  Vector h, c;
  // Gate activations kept for backpropagation.
  Vector f_l, f_r, i, o, u;
};

struct Encoding {
  Vector v;
  std::size_t node_count = 0;
};

namespace detail {

inline bool is_zero(std::span<const double> v) {
  for (double x : v) {
    if (x != 0.0) return false;
  }
  return true;
}

// y += M x, skipped when x is all zeros.
inline void gemv_acc_sparse(std::span<double> y, const Matrix& m, std::span<const double> x,
                            bool x_zero) {
  if (!x_zero) nn::gemv_acc(y, m, x);
}

}  // namespace detail

inline NodeState encode_node(std::span<const double> e, std::span<const double> h_l,
                             std::span<const double> c_l, std::span<const double> h_r,
                             std::span<const double> c_r, const ModelParams& p) {
  const std::size_t n = p.n;
  if (e.size() != p.d_e || h_l.size() != n || c_l.size() != n || h_r.size() != n ||
      c_r.size() != n) {
    throw DimensionError("encode_node: input sizes do not match the parameters");
  }
  const bool zl = detail::is_zero(h_l);
  const bool zr = detail::is_zero(h_r);

  Vector wf(n, 0.0);
  nn::gemv_acc(wf, p.w_f, e);

  NodeState s;
  s.f_l.assign(n, 0.0);
  s.f_r.assign(n, 0.0);
  s.i.assign(n, 0.0);
  s.o.assign(n, 0.0);
  s.u.assign(n, 0.0);
  detail::gemv_acc_sparse(s.f_l, p.u_f_ll, h_l, zl);
  detail::gemv_acc_sparse(s.f_l, p.u_f_lr, h_r, zr);
  detail::gemv_acc_sparse(s.f_r, p.u_f_rl, h_l, zl);
  detail::gemv_acc_sparse(s.f_r, p.u_f_rr, h_r, zr);
  nn::gemv_acc(s.i, p.w_i, e);
  detail::gemv_acc_sparse(s.i, p.u_i_l, h_l, zl);
  detail::gemv_acc_sparse(s.i, p.u_i_r, h_r, zr);
  nn::gemv_acc(s.o, p.w_o, e);
  detail::gemv_acc_sparse(s.o, p.u_o_l, h_l, zl);
  detail::gemv_acc_sparse(s.o, p.u_o_r, h_r, zr);
  nn::gemv_acc(s.u, p.w_u, e);
  detail::gemv_acc_sparse(s.u, p.u_u_l, h_l, zl);
  detail::gemv_acc_sparse(s.u, p.u_u_r, h_r, zr);

  s.c.assign(n, 0.0);
  s.h.assign(n, 0.0);
  const auto bf = p.b_f.values();
  const auto bi = p.b_i.values();
  const auto bo = p.b_o.values();
  const auto bu = p.b_u.values();
  for (std::size_t k = 0; k < n; ++k) {
    s.f_l[k] = nn::sigmoid(wf[k] + s.f_l[k] + bf[k]);
    s.f_r[k] = nn::sigmoid(wf[k] + s.f_r[k] + bf[k]);
    s.i[k] = nn::sigmoid(s.i[k] + bi[k]);
    s.o[k] = nn::sigmoid(s.o[k] + bo[k]);
    s.u[k] = std::tanh(s.u[k] + bu[k]);
    s.c[k] = s.i[k] * s.u[k] + c_l[k] * s.f_l[k] + c_r[k] * s.f_r[k];
    s.h[k] = s.o[k] * std::tanh(s.c[k]);
  }
  return s;
}

// Forward pass with every node's state retained, for backpropagation.
struct TreeTrace {
  BinTree tree;
  std::vector<NodeState> states;  // indexed like tree nodes

  const Vector& root_h() const { return states.at(0).h; }
};

inline void check_labels(const BinTree& tree) {
  for (const auto& node : tree.nodes()) {
    if (node.label < 1 || node.label > kNumLabels) {
      throw DomainError("node label out of range: " + std::to_string(node.label));
    }
  }
}

inline TreeTrace forward_tree(const BinTree& tree, const ModelParams& p) {
  if (tree.empty()) throw DomainError("cannot encode an empty tree");
  check_labels(tree);
  TreeTrace trace;
  trace.tree = tree;
  trace.states.resize(tree.size());
  const Vector missing(p.n, p.leaf_state);
  for (auto idx : tree.post_order()) {
    const auto& node = tree.node(static_cast<std::size_t>(idx));
    const NodeState* l = node.left >= 0 ? &trace.states[static_cast<std::size_t>(node.left)] : nullptr;
    const NodeState* r = node.right >= 0 ? &trace.states[static_cast<std::size_t>(node.right)] : nullptr;
    trace.states[static_cast<std::size_t>(idx)] =
        encode_node(p.embedding.row(static_cast<std::size_t>(node.label - 1)),
                    l ? l->h : missing, l ? l->c : missing, r ? r->h : missing,
                    r ? r->c : missing, p);
  }
  return trace;
}

// Inference-only encoding: gate caches are dropped as soon as a node's
// parent has consumed its state.
inline Encoding encode_tree(const BinTree& tree, const ModelParams& p) {
  if (tree.empty()) throw DomainError("cannot encode an empty tree");
  check_labels(tree);
  struct HC {
    Vector h, c;
  };
  std::vector<HC> states(tree.size());
  const Vector missing(p.n, p.leaf_state);
  for (auto idx : tree.post_order()) {
    const auto& node = tree.node(static_cast<std::size_t>(idx));
    HC* l = node.left >= 0 ? &states[static_cast<std::size_t>(node.left)] : nullptr;
    HC* r = node.right >= 0 ? &states[static_cast<std::size_t>(node.right)] : nullptr;
    NodeState s = encode_node(p.embedding.row(static_cast<std::size_t>(node.label - 1)),
                              l ? l->h : missing, l ? l->c : missing, r ? r->h : missing,
                              r ? r->c : missing, p);
    if (l) *l = HC{};
    if (r) *r = HC{};
    states[static_cast<std::size_t>(idx)] = HC{std::move(s.h), std::move(s.c)};
  }
  return Encoding{std::move(states[0].h), tree.size()};
}

inline Encoding encode_ast(const AstNode& root, const ModelParams& p) {
  return encode_tree(binarize_lcrs(root), p);
}

// Gradients flowing out of one node into its inputs.
struct NodeInputGrads {
  Vector e, h_l, c_l, h_r, c_r;
};

// Backpropagates (dh, dc) through one node, accumulating parameter gradients
// (except the embedding row, which the caller owns) into `grads`.
inline NodeInputGrads backward_node(const NodeState& s, std::span<const double> e,
                                    std::span<const double> h_l, std::span<const double> c_l,
                                    std::span<const double> h_r, std::span<const double> c_r,
                                    std::span<const double> dh, std::span<const double> dc,
                                    const ModelParams& p, ModelParams& grads) {
  const std::size_t n = p.n;
  if (dh.size() != n || dc.size() != n || s.h.size() != n) {
    throw DimensionError("backward_node: gradient sizes do not match the parameters");
  }
  Vector a_fl(n), a_fr(n), a_i(n), a_o(n), a_u(n), a_f(n);
  NodeInputGrads out;
  out.c_l.assign(n, 0.0);
  out.c_r.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double tc = std::tanh(s.c[k]);
    const double d_o = dh[k] * tc;
    const double dct = dc[k] + dh[k] * s.o[k] * (1.0 - tc * tc);
    const double d_i = dct * s.u[k];
    const double d_u = dct * s.i[k];
    const double d_fl = dct * c_l[k];
    const double d_fr = dct * c_r[k];
    out.c_l[k] = dct * s.f_l[k];
    out.c_r[k] = dct * s.f_r[k];
    a_fl[k] = d_fl * s.f_l[k] * (1.0 - s.f_l[k]);
    a_fr[k] = d_fr * s.f_r[k] * (1.0 - s.f_r[k]);
    a_i[k] = d_i * s.i[k] * (1.0 - s.i[k]);
    a_o[k] = d_o * s.o[k] * (1.0 - s.o[k]);
    a_u[k] = d_u * (1.0 - s.u[k] * s.u[k]);
    a_f[k] = a_fl[k] + a_fr[k];
  }

  nn::outer_acc(grads.w_f, a_f, e);
  nn::outer_acc(grads.w_i, a_i, e);
  nn::outer_acc(grads.w_o, a_o, e);
  nn::outer_acc(grads.w_u, a_u, e);
  const bool zl = detail::is_zero(h_l);
  const bool zr = detail::is_zero(h_r);
  if (!zl) {
    nn::outer_acc(grads.u_f_ll, a_fl, h_l);
    nn::outer_acc(grads.u_f_rl, a_fr, h_l);
    nn::outer_acc(grads.u_i_l, a_i, h_l);
    nn::outer_acc(grads.u_o_l, a_o, h_l);
    nn::outer_acc(grads.u_u_l, a_u, h_l);
  }
  if (!zr) {
    nn::outer_acc(grads.u_f_lr, a_fl, h_r);
    nn::outer_acc(grads.u_f_rr, a_fr, h_r);
    nn::outer_acc(grads.u_i_r, a_i, h_r);
    nn::outer_acc(grads.u_o_r, a_o, h_r);
    nn::outer_acc(grads.u_u_r, a_u, h_r);
  }
  nn::add_to(grads.b_f.values(), a_f);
  nn::add_to(grads.b_i.values(), a_i);
  nn::add_to(grads.b_o.values(), a_o);
  nn::add_to(grads.b_u.values(), a_u);

  out.e.assign(p.d_e, 0.0);
  nn::gemv_t_acc(out.e, p.w_f, a_f);
  nn::gemv_t_acc(out.e, p.w_i, a_i);
  nn::gemv_t_acc(out.e, p.w_o, a_o);
  nn::gemv_t_acc(out.e, p.w_u, a_u);

  out.h_l.assign(n, 0.0);
  nn::gemv_t_acc(out.h_l, p.u_f_ll, a_fl);
  nn::gemv_t_acc(out.h_l, p.u_f_rl, a_fr);
  nn::gemv_t_acc(out.h_l, p.u_i_l, a_i);
  nn::gemv_t_acc(out.h_l, p.u_o_l, a_o);
  nn::gemv_t_acc(out.h_l, p.u_u_l, a_u);
  out.h_r.assign(n, 0.0);
  nn::gemv_t_acc(out.h_r, p.u_f_lr, a_fl);
  nn::gemv_t_acc(out.h_r, p.u_f_rr, a_fr);
  nn::gemv_t_acc(out.h_r, p.u_i_r, a_i);
  nn::gemv_t_acc(out.h_r, p.u_o_r, a_o);
  nn::gemv_t_acc(out.h_r, p.u_u_r, a_u);
  return out;
}

// Reverse-topological backpropagation of d(loss)/d(root h) through a traced
// tree. Gradients are added to `grads`, including embedding rows of every
// label present in the tree.
inline void backward_tree(const TreeTrace& trace, const ModelParams& p,
                          std::span<const double> d_root_h, ModelParams& grads) {
  if (trace.states.size() != trace.tree.size() || trace.states.empty() ||
      trace.states[0].h.size() != p.n) {
    throw Error("backward_tree: missing or stale forward cache");
  }
  if (d_root_h.size() != p.n) throw DimensionError("backward_tree: upstream size mismatch");
  if (!grads.same_shape(p)) throw DimensionError("backward_tree: gradient shape mismatch");

  const std::size_t count = trace.tree.size();
  std::vector<Vector> dh(count), dc(count);
  dh[0].assign(d_root_h.begin(), d_root_h.end());
  dc[0].assign(p.n, 0.0);
  const Vector missing(p.n, p.leaf_state);
  const auto& order = trace.tree.post_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto idx = static_cast<std::size_t>(*it);
    const auto& node = trace.tree.node(idx);
    const NodeState* l = node.left >= 0 ? &trace.states[static_cast<std::size_t>(node.left)] : nullptr;
    const NodeState* r = node.right >= 0 ? &trace.states[static_cast<std::size_t>(node.right)] : nullptr;
    const auto row = static_cast<std::size_t>(node.label - 1);
    NodeInputGrads g = backward_node(trace.states[idx], p.embedding.row(row),
                                     l ? l->h : missing, l ? l->c : missing,
                                     r ? r->h : missing, r ? r->c : missing, dh[idx], dc[idx],
                                     p, grads);
    nn::add_to(grads.embedding.row(row), g.e);
    if (l) {
      dh[static_cast<std::size_t>(node.left)] = std::move(g.h_l);
      dc[static_cast<std::size_t>(node.left)] = std::move(g.c_l);
    }
    if (r) {
      dh[static_cast<std::size_t>(node.right)] = std::move(g.h_r);
      dc[static_cast<std::size_t>(node.right)] = std::move(g.c_r);
    }
    dh[idx] = Vector{};
    dc[idx] = Vector{};
  }
}

}  // namespace astsim
