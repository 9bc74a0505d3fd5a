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

// Parameters of the Tree-LSTM encoder and the similarity head, plus the
// v1 checkpoint format:
//
//   {"ckpt":"v1","d_e":..,"n":..,"vocab":43,"seed":..,...,"tensors":[...]}\n
//   <tensor payloads, little-endian float64, in header order>
//   <optional optimizer accumulators, same order>

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "astsim/ast.hpp"
#include "astsim/error.hpp"
#include "astsim/tensor.hpp"
#include "astsim/util.hpp"
#include "json.hpp"

namespace astsim {

inline constexpr std::size_t kDefaultEmbedding = 16;
inline constexpr std::size_t kDefaultHidden = 64;

// One parameter set shared by both Siamese branches.
struct ModelParams {
  std::size_t d_e = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  // Adds a bias to the head logits. Off by default.
  bool head_bias = false;
  // State given to absent children: 0 (default) or 1.
  double leaf_state = 0.0;

  Matrix embedding;  // 43 x d_e, row (label - 1)

  Matrix w_f, w_i, w_o, w_u;  // n x d_e

  Matrix u_f_ll, u_f_lr, u_f_rl, u_f_rr;  // n x n
  Matrix u_i_l, u_i_r;
  Matrix u_o_l, u_o_r;
  Matrix u_u_l, u_u_r;

  Matrix b_f, b_i, b_o, b_u;  // n x 1

  Matrix w_s;  // 2n x 2
  Matrix b_s;  // 2 x 1, used only with head_bias

  // Calls fn(name, tensor) for every tensor in a fixed order.
  template <typename Self, typename Fn>
  static void visit(Self& self, Fn&& fn) {
    fn("E", self.embedding);
    fn("W_f", self.w_f);
    fn("W_i", self.w_i);
    fn("W_o", self.w_o);
    fn("W_u", self.w_u);
    fn("U_f_ll", self.u_f_ll);
    fn("U_f_lr", self.u_f_lr);
    fn("U_f_rl", self.u_f_rl);
    fn("U_f_rr", self.u_f_rr);
    fn("U_i_l", self.u_i_l);
    fn("U_i_r", self.u_i_r);
    fn("U_o_l", self.u_o_l);
    fn("U_o_r", self.u_o_r);
    fn("U_u_l", self.u_u_l);
    fn("U_u_r", self.u_u_r);
    fn("b_f", self.b_f);
    fn("b_i", self.b_i);
    fn("b_o", self.b_o);
    fn("b_u", self.b_u);
    fn("W_s", self.w_s);
    fn("b_s", self.b_s);
  }

  template <typename Fn>
  void for_each(Fn&& fn) { visit(*this, std::forward<Fn>(fn)); }
  template <typename Fn>
  void for_each(Fn&& fn) const { visit(*this, std::forward<Fn>(fn)); }

  std::size_t parameter_count() const {
    std::size_t total = 0;
    for_each([&](std::string_view, const Matrix& m) { total += m.size(); });
    return total;
  }

  bool same_shape(const ModelParams& o) const {
    return d_e == o.d_e && n == o.n;
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// All-zero parameters with the given shapes.
inline ModelParams zero_params(std::size_t d_e, std::size_t n) {
  if (d_e < 1 || n < 1) {
    throw DimensionError("embedding and hidden sizes must be >= 1");
  }
  ModelParams p;
  p.d_e = d_e;
  p.n = n;
  p.embedding = Matrix(kNumLabels, d_e);
  for (Matrix* m : {&p.w_f, &p.w_i, &p.w_o, &p.w_u}) *m = Matrix(n, d_e);
  for (Matrix* m : {&p.u_f_ll, &p.u_f_lr, &p.u_f_rl, &p.u_f_rr, &p.u_i_l, &p.u_i_r,
                    &p.u_o_l, &p.u_o_r, &p.u_u_l, &p.u_u_r}) {
    *m = Matrix(n, n);
  }
  for (Matrix* m : {&p.b_f, &p.b_i, &p.b_o, &p.b_u}) *m = Matrix(n, 1);
  p.w_s = Matrix(2 * n, 2);
  p.b_s = Matrix(2, 1);
  return p;
}

// Same shapes and flags as `like`, all values zero.
inline ModelParams zeros_like(const ModelParams& like) {
  ModelParams p = zero_params(like.d_e, like.n);
  p.seed = like.seed;
  p.head_bias = like.head_bias;
  p.leaf_state = like.leaf_state;
  return p;
}

// Weights uniform in [-1/sqrt(n), 1/sqrt(n)], biases zero.
inline ModelParams init_params(std::size_t d_e, std::size_t n, std::uint64_t seed) {
  ModelParams p = zero_params(d_e, n);
  p.seed = seed;
  Rng rng(mix_seed(seed, "init"));
  const double bound = 1.0 / std::sqrt(static_cast<double>(n));
  p.for_each([&](std::string_view name, Matrix& m) {
    if (name.starts_with("b_")) return;
    for (double& v : m.values()) v = rng.uniform(-bound, bound);
  });
  return p;
}

// Content hash over shapes, flags and values (hex, 16 chars).
inline std::string params_hash(const ModelParams& p) {
  std::uint64_t h = kFnvBasis;
  auto mix = [&](const auto& v) { h = fnv1a(&v, sizeof(v), h); };
  std::uint64_t d_e = p.d_e, n = p.n;
  mix(d_e);
  mix(n);
  std::uint8_t bias = p.head_bias ? 1 : 0;
  mix(bias);
  mix(p.leaf_state);
  p.for_each([&](std::string_view name, const Matrix& m) {
    h = fnv1a(name, h);
    std::uint64_t r = m.rows(), c = m.cols();
    mix(r);
    mix(c);
    h = fnv1a(m.values().data(), m.size() * sizeof(double), h);
  });
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

// ---------------------------------------------------------------------------
// Checkpoint I/O

namespace detail {

inline void write_f64_le(std::ostream& out, std::span<const double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
  } else {
    for (double v : values) {
      auto bits = std::bit_cast<std::uint64_t>(v);
      char bytes[8];
      for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
      out.write(bytes, 8);
    }
  }
}

inline void read_f64_le(std::istream& in, std::span<double> values) {
  std::vector<unsigned char> buf(values.size() * 8);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
    throw SchemaError("checkpoint truncated");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | buf[i * 8 + static_cast<std::size_t>(b)];
    values[i] = std::bit_cast<double>(bits);
  }
}

}  // namespace detail

struct Checkpoint {
  ModelParams params;
  // AdaGrad accumulators, when saved.
  std::optional<ModelParams> optimizer;
};

inline void save_checkpoint(std::ostream& out, const ModelParams& p,
                            const ModelParams* accumulators = nullptr) {
  nlohmann::ordered_json header;
  header["ckpt"] = "v1";
  header["d_e"] = p.d_e;
  header["n"] = p.n;
  header["vocab"] = kNumLabels;
  header["seed"] = p.seed;
  header["head_bias"] = p.head_bias;
  header["leaf_state"] = p.leaf_state;
  header["optimizer"] = accumulators != nullptr;
  auto tensors = nlohmann::ordered_json::array();
  p.for_each([&](std::string_view name, const Matrix& m) {
    tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  });
  header["tensors"] = std::move(tensors);
  out << header.dump() << '\n';
  p.for_each([&](std::string_view, const Matrix& m) { detail::write_f64_le(out, m.values()); });
  if (accumulators) {
    accumulators->for_each(
        [&](std::string_view, const Matrix& m) { detail::write_f64_le(out, m.values()); });
  }
}

inline Checkpoint load_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty checkpoint");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("bad checkpoint header: ") + e.what(), 1, e.byte);
  }
  if (header.value("ckpt", "") != "v1") throw SchemaError("not a v1 checkpoint");
  if (header.value("vocab", 0) != kNumLabels) throw SchemaError("checkpoint vocab mismatch");
  Checkpoint ck;
  ck.params = zero_params(header.at("d_e").get<std::size_t>(), header.at("n").get<std::size_t>());
  ck.params.seed = header.value("seed", std::uint64_t{0});
  ck.params.head_bias = header.value("head_bias", false);
  ck.params.leaf_state = header.value("leaf_state", 0.0);
  const auto& tensors = header.at("tensors");
  std::size_t i = 0;
  ck.params.for_each([&](std::string_view name, Matrix& m) {
    if (i >= tensors.size()) throw SchemaError("checkpoint is missing tensors");
    const auto& t = tensors[i++];
    if (t.at("name").get<std::string>() != name || t.at("rows").get<std::size_t>() != m.rows() ||
        t.at("cols").get<std::size_t>() != m.cols()) {
      throw SchemaError("checkpoint tensor " + std::string(name) + " has unexpected shape");
    }
  });
  ck.params.for_each([&](std::string_view, Matrix& m) { detail::read_f64_le(in, m.values()); });
  if (header.value("optimizer", false)) {
    ModelParams acc = zeros_like(ck.params);
    acc.for_each([&](std::string_view, Matrix& m) { detail::read_f64_le(in, m.values()); });
    ck.optimizer = std::move(acc);
  }
  return ck;
}

inline void save_checkpoint_file(const std::string& path, const ModelParams& p,
                                 const ModelParams* accumulators = nullptr) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  save_checkpoint(out, p, accumulators);
}

inline Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return load_checkpoint(in);
}

}  // namespace astsim
