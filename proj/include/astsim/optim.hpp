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

// Training primitives: binary cross-entropy, AdaGrad and a central
// finite-difference gradient checker.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "astsim/error.hpp"
#include "astsim/params.hpp"
#include "astsim/tensor.hpp"
#include "astsim/util.hpp"

namespace astsim {

inline constexpr double kLogClamp = 1e-12;

struct BceResult {
  double loss = 0.0;
  std::array<double, 2> grad{};  // d loss / d pred
};

// Mean over the two components of -[y ln p + (1 - y) ln(1 - p)]. Arguments
// of the logs are clamped to [1e-12, 1 - 1e-12].
inline BceResult bce_loss(std::span<const double, 2> pred, std::span<const double, 2> label) {
  BceResult r;
  for (std::size_t k = 0; k < 2; ++k) {
    double p = pred[k];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("BCE prediction outside [0, 1]: " + std::to_string(p));
    }
    p = std::clamp(p, kLogClamp, 1.0 - kLogClamp);
    const double y = label[k];
    r.loss += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p)) / 2.0;
    r.grad[k] = (-y / p + (1.0 - y) / (1.0 - p)) / 2.0;
  }
  return r;
}

struct AdaGradState {
  ModelParams accumulators;
  double lr = 0.05;
  double eps = 1e-8;
};

inline AdaGradState make_adagrad(const ModelParams& params, double lr = 0.05, double eps = 1e-8) {
  return AdaGradState{zeros_like(params), lr, eps};
}

namespace detail {

// Pairs up the tensors of two same-shaped parameter sets.
template <typename A, typename B, typename Fn>
void zip_tensors(A& a, B& b, Fn&& fn) {
  std::vector<Matrix*> bs;
  b.for_each([&](std::string_view, auto& m) { bs.push_back(const_cast<Matrix*>(&m)); });
  std::size_t i = 0;
  a.for_each([&](std::string_view name, auto& m) {
    if (!m.same_shape(*bs[i])) {
      throw DimensionError("shape mismatch on tensor " + std::string(name));
    }
    fn(name, m, *bs[i]);
    ++i;
  });
}

}  // namespace detail

// acc += g^2; theta -= lr * g / (sqrt(acc) + eps), elementwise.
inline void adagrad_step(ModelParams& params, const ModelParams& grads, AdaGradState& state) {
  if (!params.same_shape(grads) || !params.same_shape(state.accumulators)) {
    throw DimensionError("AdaGrad shape mismatch");
  }
  std::vector<Matrix*> accs;
  state.accumulators.for_each([&](std::string_view, Matrix& m) { accs.push_back(&m); });
  std::size_t i = 0;
  detail::zip_tensors(params, grads, [&](std::string_view, Matrix& theta, const Matrix& g) {
    Matrix& acc = *accs[i++];
    auto tv = theta.values();
    auto gv = g.values();
    auto av = acc.values();
    for (std::size_t k = 0; k < tv.size(); ++k) {
      const double gk = gv[k];
      if (gk == 0.0) continue;
      av[k] += gk * gk;
      tv[k] -= state.lr * gk / (std::sqrt(av[k]) + state.eps);
    }
  });
}

// ---------------------------------------------------------------------------
// Gradient checking

struct GradCheckOptions {
  double h = 1e-5;
  // Denominator floor of the relative error, so coordinates whose true
  // gradient vanishes are judged on absolute error instead.
  double floor = 1e-6;
  // Coordinates sampled per tensor (all of them if the tensor is smaller).
  std::size_t per_tensor = 8;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

inline double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

// Central differences (f(x+h) - f(x-h)) / 2h over `indices` of a flat
// parameter vector, compared to the analytic gradient.
inline GradCheckResult grad_check(const std::function<double(std::span<const double>)>& f,
                                  std::span<double> theta, std::span<const double> analytic,
                                  std::span<const std::size_t> indices,
                                  const GradCheckOptions& opt = {}) {
  if (theta.size() != analytic.size()) throw DimensionError("grad_check size mismatch");
  GradCheckResult r;
  for (std::size_t idx : indices) {
    const double saved = theta[idx];
    theta[idx] = saved + opt.h;
    const double fp = f(theta);
    theta[idx] = saved - opt.h;
    const double fm = f(theta);
    theta[idx] = saved;
    const double numeric = (fp - fm) / (2.0 * opt.h);
    const double err = relative_error(analytic[idx], numeric, opt.floor);
    ++r.checked;
    if (err > r.max_rel_error || r.checked == 1) {
      r.max_rel_error = std::max(r.max_rel_error, err);
      r.worst_index = idx;
      r.worst_analytic = analytic[idx];
      r.worst_numeric = numeric;
    }
  }
  return r;
}

// Same check over a sample of coordinates of every tensor in `params`.
// `loss` is evaluated on the (temporarily perturbed) params.
inline GradCheckResult grad_check(const std::function<double(const ModelParams&)>& loss,
                                  ModelParams& params, const ModelParams& analytic,
                                  const GradCheckOptions& opt = {}) {
  Rng rng(mix_seed(opt.seed, "grad-check"));
  GradCheckResult total;
  detail::zip_tensors(params, analytic, [&](std::string_view name, Matrix& m, const Matrix& g) {
    if (name == "b_s" && !params.head_bias) return;
    std::vector<std::size_t> indices;
    if (m.size() <= opt.per_tensor) {
      for (std::size_t i = 0; i < m.size(); ++i) indices.push_back(i);
    } else {
      for (std::size_t i = 0; i < opt.per_tensor; ++i) indices.push_back(rng.index(m.size()));
    }
    // Embedding rows of absent labels have zero gradient on both sides; also
    // probe the rows that carry signal.
    if (name == "E") {
      for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = g.row(r);
        if (std::any_of(row.begin(), row.end(), [](double v) { return v != 0.0; })) {
          indices.push_back(r * m.cols() + rng.index(m.cols()));
        }
      }
    }
    auto f = [&](std::span<const double>) { return loss(params); };
    GradCheckResult r = grad_check(f, m.values(), g.values(), indices, opt);
    total.checked += r.checked;
    if (r.max_rel_error > total.max_rel_error || total.worst_tensor.empty()) {
      total.max_rel_error = std::max(total.max_rel_error, r.max_rel_error);
      total.worst_tensor = std::string(name);
      total.worst_index = r.worst_index;
      total.worst_analytic = r.worst_analytic;
      total.worst_numeric = r.worst_numeric;
    }
  });
  return total;
}

}  // namespace astsim
