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

// ROC curves, AUC and the Youden operating point. A pair scoring r is
// predicted positive at threshold t when r >= t.

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "astsim/error.hpp"

namespace astsim {

struct ScoredLabel {
  double score = 0.0;
  int label = 1;  // +1 positive (homologous), -1 negative
};

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
};

struct RocCurve {
  // Thresholds descending; the first point is (0, 0) at +inf and the last
  // is (1, 1).
  std::vector<RocPoint> points;
  double auc = 0.0;
  std::int64_t positives = 0;
  std::int64_t negatives = 0;
};

// Sweeps every distinct score as a threshold. The trapezoid area is
// accumulated in integers, so it equals the Wilcoxon statistic
// P(s+ > s-) + P(s+ = s-)/2 exactly up to the final division.
inline RocCurve roc_auc(std::vector<ScoredLabel> scores) {
  RocCurve curve;
  for (const ScoredLabel& s : scores) {
    if (s.label > 0) {
      ++curve.positives;
    } else {
      ++curve.negatives;
    }
  }
  if (curve.positives == 0 || curve.negatives == 0) {
    throw DatasetError("ROC needs at least one positive and one negative");
  }
  std::sort(scores.begin(), scores.end(),
            [](const ScoredLabel& a, const ScoredLabel& b) { return a.score > b.score; });
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0, 0, 0});
  std::int64_t tp = 0, fp = 0, area2 = 0;
  for (std::size_t i = 0; i < scores.size();) {
    const double t = scores[i].score;
    const std::int64_t tp0 = tp, fp0 = fp;
    for (; i < scores.size() && scores[i].score == t; ++i) {
      if (scores[i].label > 0) {
        ++tp;
      } else {
        ++fp;
      }
    }
    area2 += (fp - fp0) * (tp + tp0);
    curve.points.push_back({t, static_cast<double>(fp) / static_cast<double>(curve.negatives),
                            static_cast<double>(tp) / static_cast<double>(curve.positives), tp, fp});
  }
  curve.auc = static_cast<double>(area2) /
              (2.0 * static_cast<double>(curve.positives) * static_cast<double>(curve.negatives));
  return curve;
}

struct YoudenPoint {
  double threshold = 0.0;
  double j = 0.0;  // TPR - FPR
};

// Threshold maximizing TPR - FPR over the finite sweep points; ties go to
// the higher threshold.
inline YoudenPoint youden_threshold(const RocCurve& curve) {
  YoudenPoint best{0.0, -2.0};
  bool found = false;
  std::int64_t best_num = 0;
  for (const RocPoint& p : curve.points) {
    if (p.threshold == std::numeric_limits<double>::infinity()) continue;
    // Compare TP/P - FP/N exactly as TP*N - FP*P.
    const std::int64_t num = p.tp * curve.negatives - p.fp * curve.positives;
    if (!found || num > best_num) {
      found = true;
      best_num = num;
      best = {p.threshold, p.tpr - p.fpr};
    }
  }
  if (!found) throw DatasetError("empty ROC curve");
  return best;
}

// CSV "threshold,fpr,tpr", one row per sweep point.
inline void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "threshold,fpr,tpr\n";
  auto old = out.precision(17);
  for (const RocPoint& p : curve.points) {
    out << p.threshold << ',' << p.fpr << ',' << p.tpr << '\n';
  }
  out.precision(old);
}

}  // namespace astsim
