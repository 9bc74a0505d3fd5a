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

// Siamese similarity head, training loop and inference.
//
// M(T1, T2) = softmax(sigmoid(cat(|v1 - v2|, v1 * v2)) x W_s)
//
// where v1, v2 are the tree encodings and W_s is 2n x 2. The output is
// [dissimilarity, similarity].

#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "astsim/ast.hpp"
#include "astsim/corpus.hpp"
#include "astsim/error.hpp"
#include "astsim/metrics.hpp"
#include "astsim/optim.hpp"
#include "astsim/params.hpp"
#include "astsim/tensor.hpp"
#include "astsim/tree_lstm.hpp"
#include "astsim/util.hpp"

namespace astsim {

struct SimilarityOutput {
  double dissim = 0.5;
  double sim = 0.5;
};

// Intermediate values of the head kept for backpropagation.
struct HeadTrace {
  Vector diff;  // v1 - v2
  Vector z;     // sigmoid(cat(|diff|, v1 * v2)), length 2n
  std::array<double, 2> probs{};
};

inline HeadTrace similarity_trace(std::span<const double> v1, std::span<const double> v2,
                                  const ModelParams& p) {
  const std::size_t n = p.n;
  if (v1.size() != n || v2.size() != n) {
    throw DimensionError("similarity: encoding sizes do not match the parameters");
  }
  HeadTrace t;
  t.diff.resize(n);
  t.z.resize(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    t.diff[k] = v1[k] - v2[k];
    t.z[k] = nn::sigmoid(std::abs(t.diff[k]));
    t.z[n + k] = nn::sigmoid(v1[k] * v2[k]);
  }
  std::array<double, 2> logits{0.0, 0.0};
  const Matrix& w = p.w_s;
  for (std::size_t r = 0; r < 2 * n; ++r) {
    logits[0] += t.z[r] * w(r, 0);
    logits[1] += t.z[r] * w(r, 1);
  }
  if (p.head_bias) {
    logits[0] += p.b_s(0, 0);
    logits[1] += p.b_s(1, 0);
  }
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  t.probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
  return t;
}

inline SimilarityOutput similarity(std::span<const double> v1, std::span<const double> v2,
                                   const ModelParams& p) {
  HeadTrace t = similarity_trace(v1, v2, p);
  return {t.probs[0], t.probs[1]};
}

inline SimilarityOutput similarity(const Encoding& a, const Encoding& b, const ModelParams& p) {
  return similarity(a.v, b.v, p);
}

struct HeadGrads {
  Vector v1, v2;
};

// Backpropagates d(loss)/d(probs) through the head; W_s (and b_s) gradients
// are added to `grads`.
inline HeadGrads backward_similarity(const HeadTrace& t, std::span<const double> v1,
                                     std::span<const double> v2, std::span<const double, 2> dprobs,
                                     const ModelParams& p, ModelParams& grads) {
  const std::size_t n = p.n;
  // Softmax Jacobian: dl_j = p_j (dp_j - sum_k p_k dp_k).
  const double dot = t.probs[0] * dprobs[0] + t.probs[1] * dprobs[1];
  const std::array<double, 2> dlogits{t.probs[0] * (dprobs[0] - dot),
                                      t.probs[1] * (dprobs[1] - dot)};
  HeadGrads out;
  out.v1.assign(n, 0.0);
  out.v2.assign(n, 0.0);
  for (std::size_t r = 0; r < 2 * n; ++r) {
    grads.w_s(r, 0) += t.z[r] * dlogits[0];
    grads.w_s(r, 1) += t.z[r] * dlogits[1];
  }
  if (p.head_bias) {
    grads.b_s(0, 0) += dlogits[0];
    grads.b_s(1, 0) += dlogits[1];
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double dz_abs = p.w_s(k, 0) * dlogits[0] + p.w_s(k, 1) * dlogits[1];
    const double dz_mul = p.w_s(n + k, 0) * dlogits[0] + p.w_s(n + k, 1) * dlogits[1];
    const double dq_abs = dz_abs * t.z[k] * (1.0 - t.z[k]);
    const double dq_mul = dz_mul * t.z[n + k] * (1.0 - t.z[n + k]);
    const double sign = t.diff[k] > 0 ? 1.0 : (t.diff[k] < 0 ? -1.0 : 0.0);
    out.v1[k] = dq_abs * sign + dq_mul * v2[k];
    out.v2[k] = -dq_abs * sign + dq_mul * v1[k];
  }
  return out;
}

// One-hot target: [0, 1] for homologous, [1, 0] otherwise.
inline std::array<double, 2> label_vector(int label) {
  if (label != 1 && label != -1) throw DomainError("pair label must be +1 or -1");
  return label > 0 ? std::array<double, 2>{0.0, 1.0} : std::array<double, 2>{1.0, 0.0};
}

// BCE loss of one pair. When `grads` is given, gradients of both branches
// and the head are accumulated into it.
inline double pair_loss(const BinTree& t1, const BinTree& t2, int label, const ModelParams& p,
                        ModelParams* grads = nullptr) {
  const std::array<double, 2> target = label_vector(label);
  if (!grads) {
    Encoding a = encode_tree(t1, p);
    Encoding b = encode_tree(t2, p);
    HeadTrace head = similarity_trace(a.v, b.v, p);
    return bce_loss(head.probs, target).loss;
  }
  TreeTrace a = forward_tree(t1, p);
  TreeTrace b = forward_tree(t2, p);
  HeadTrace head = similarity_trace(a.root_h(), b.root_h(), p);
  BceResult bce = bce_loss(head.probs, target);
  HeadGrads hg = backward_similarity(head, a.root_h(), b.root_h(), bce.grad, p, *grads);
  backward_tree(a, p, hg.v1, *grads);
  backward_tree(b, p, hg.v2, *grads);
  return bce.loss;
}

// Similarity score M(t1, t2), the second softmax component.
inline double predict(const BinTree& t1, const BinTree& t2, const ModelParams& p) {
  Encoding a = encode_tree(t1, p);
  Encoding b = encode_tree(t2, p);
  HeadTrace head = similarity_trace(a.v, b.v, p);
  // Identical trees must give an exactly zero difference branch.
  assert(!(t1 == t2) ||
         std::all_of(head.diff.begin(), head.diff.end(), [](double d) { return d == 0.0; }));
  return head.probs[1];
}

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  std::size_t epochs = 60;
  double lr = 0.05;
  double eps = 1e-8;
  std::uint64_t seed = 0;
  std::size_t d_e = kDefaultEmbedding;
  std::size_t n = kDefaultHidden;
  // Test AUC is computed every `eval_every` epochs (and at the last epoch).
  std::size_t eval_every = 1;
  // Stop after this many evaluations without improvement; 0 disables.
  std::size_t patience = 0;
  bool head_bias = false;
  double leaf_state = 0.0;
  // Called after each epoch.
  std::function<void(std::size_t epoch, double train_loss, std::optional<double> test_auc)>
      on_epoch;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  std::optional<double> test_auc;
};

struct TrainResult {
  ModelParams params;  // best epoch
  std::size_t best_epoch = 0;
  std::vector<EpochMetrics> trace;
  AdaGradState optimizer;  // state after the best epoch
};

struct PreparedPair {
  BinTree t1, t2;
  std::int64_t c1 = 0, c2 = 0;
  int label = 1;
};

inline std::vector<PreparedPair> prepare_pairs(const std::vector<PairSample>& pairs) {
  std::vector<PreparedPair> out;
  out.reserve(pairs.size());
  for (const PairSample& p : pairs) {
    out.push_back({binarize_lcrs(p.t1), binarize_lcrs(p.t2), p.c1, p.c2, p.label});
  }
  return out;
}

// Model (uncalibrated) and calibrated scores of every pair.
struct PairScores {
  std::vector<ScoredLabel> model;
  std::vector<ScoredLabel> calibrated;
};

inline PairScores score_pairs(const std::vector<PreparedPair>& pairs, const ModelParams& p) {
  PairScores out;
  for (const PreparedPair& pair : pairs) {
    double m = predict(pair.t1, pair.t2, p);
    out.model.push_back({m, pair.label});
    out.calibrated.push_back({final_score(m, calibrate(pair.c1, pair.c2)), pair.label});
  }
  return out;
}

inline std::optional<double> model_auc(const std::vector<PreparedPair>& pairs,
                                       const ModelParams& p) {
  bool pos = false, neg = false;
  for (const auto& pair : pairs) (pair.label > 0 ? pos : neg) = true;
  if (!pos || !neg) return std::nullopt;
  return roc_auc(score_pairs(pairs, p).model).auc;
}

// Batch-size-1 training with BCE and AdaGrad. Calibration is never applied
// here. Returns the parameters of the epoch with the best test AUC (the
// lowest training loss when no test AUC is available).
inline TrainResult train(const DatasetSplit& data, const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw DatasetError("epochs must be >= 1");
  if (data.train.empty()) throw DatasetError("training set is empty");

  const auto train_set = prepare_pairs(data.train);
  const auto test_set = prepare_pairs(data.test);

  ModelParams params = init_params(cfg.d_e, cfg.n, cfg.seed);
  params.head_bias = cfg.head_bias;
  params.leaf_state = cfg.leaf_state;
  AdaGradState opt = make_adagrad(params, cfg.lr, cfg.eps);
  ModelParams grads = zeros_like(params);

  TrainResult result;
  result.params = params;
  result.optimizer = opt;
  double best_auc = -1.0;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(mix_seed(cfg.seed, "epoch-order"));

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    for (std::size_t idx : order) {
      const PreparedPair& pair = train_set[idx];
      grads.for_each([](std::string_view, Matrix& m) { m.fill(0.0); });
      total += pair_loss(pair.t1, pair.t2, pair.label, params, &grads);
      adagrad_step(params, grads, opt);
    }
    EpochMetrics m{epoch, total / static_cast<double>(train_set.size()), std::nullopt};
    bool evaluate = cfg.eval_every > 0 && (epoch % cfg.eval_every == 0 || epoch == cfg.epochs);
    if (evaluate) m.test_auc = model_auc(test_set, params);
    result.trace.push_back(m);
    if (cfg.on_epoch) cfg.on_epoch(epoch, m.train_loss, m.test_auc);

    bool improved = false;
    if (m.test_auc) {
      if (*m.test_auc > best_auc) {
        best_auc = *m.test_auc;
        improved = true;
      }
    } else if (best_auc < 0.0 && m.train_loss < best_loss) {
      improved = true;
    }
    best_loss = std::min(best_loss, m.train_loss);
    if (improved || result.best_epoch == 0) {
      result.params = params;
      result.optimizer = opt;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (evaluate) {
      ++since_best;
      if (cfg.patience > 0 && since_best >= cfg.patience) break;
    }
  }
  return result;
}

// Metrics trace JSONL: {"epoch":int,"train_loss":float,"test_auc":float|null}.
inline void write_trace_jsonl(std::ostream& out, const std::vector<EpochMetrics>& trace) {
  for (const EpochMetrics& m : trace) {
    Json j = Json::object();
    j["epoch"] = m.epoch;
    j["train_loss"] = m.train_loss;
    if (m.test_auc) {
      j["test_auc"] = *m.test_auc;
    } else {
      j["test_auc"] = nullptr;
    }
    out << j.dump() << '\n';
  }
}

}  // namespace astsim
