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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "astsim/calibration.hpp"
#include "astsim/metrics.hpp"
#include "oracles.hpp"

namespace astsim {
namespace {

std::vector<ScoredLabel> random_scores(Rng& rng, std::size_t size, int levels) {
  std::vector<ScoredLabel> s;
  for (std::size_t i = 0; i < size; ++i) {
    s.push_back({static_cast<double>(rng.range(0, levels)) / levels, rng.chance(0.5) ? 1 : -1});
  }
  s[0].label = 1;
  s[1].label = -1;
  return s;
}

TEST(Roc, PerfectAndInverted) {
  std::vector<ScoredLabel> s{{0.9, 1}, {0.8, 1}, {0.2, -1}, {0.1, -1}};
  EXPECT_EQ(roc_auc(s).auc, 1.0);
  for (auto& x : s) x.label = -x.label;
  EXPECT_EQ(roc_auc(s).auc, 0.0);
}

TEST(Roc, AllTiedIsHalf) {
  std::vector<ScoredLabel> s{{0.5, 1}, {0.5, -1}, {0.5, 1}, {0.5, -1}, {0.5, -1}};
  EXPECT_EQ(roc_auc(s).auc, 0.5);
}

TEST(Roc, HandExample) {
  // Positives 0.9, 0.6; negatives 0.6, 0.3: wins 1 + 1 + 0.5 + 1 of 4 pairs.
  std::vector<ScoredLabel> s{{0.9, 1}, {0.6, 1}, {0.6, -1}, {0.3, -1}};
  RocCurve c = roc_auc(s);
  EXPECT_DOUBLE_EQ(c.auc, 3.5 / 4.0);
  ASSERT_EQ(c.points.size(), 4u);
  EXPECT_EQ(c.points.front().fpr, 0.0);
  EXPECT_EQ(c.points.front().tpr, 0.0);
  EXPECT_EQ(c.points.back().fpr, 1.0);
  EXPECT_EQ(c.points.back().tpr, 1.0);
  EXPECT_EQ(c.points[2].threshold, 0.6);
  EXPECT_EQ(c.points[2].tpr, 1.0);
  EXPECT_EQ(c.points[2].fpr, 0.5);
}

TEST(Roc, MatchesWilcoxonWithTies) {
  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    auto s = random_scores(rng, 2 + rng.index(49), 1 + static_cast<int>(rng.index(10)));
    EXPECT_NEAR(roc_auc(s).auc, oracle::wilcoxon_auc(s), 1e-12);
  }
}

TEST(Roc, CurveIsMonotone) {
  Rng rng(2);
  auto s = random_scores(rng, 200, 30);
  RocCurve c = roc_auc(s);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    EXPECT_LT(c.points[i].threshold, c.points[i - 1].threshold);
    EXPECT_GE(c.points[i].fpr, c.points[i - 1].fpr);
    EXPECT_GE(c.points[i].tpr, c.points[i - 1].tpr);
  }
}

TEST(Roc, InvariantUnderMonotoneTransform) {
  Rng rng(3);
  auto s = random_scores(rng, 60, 12);
  auto t = s;
  for (auto& x : t) x.score = std::exp(3.0 * x.score) - 7.0;
  EXPECT_EQ(roc_auc(s).auc, roc_auc(t).auc);
}

TEST(Roc, OneClassIsAnError) {
  EXPECT_THROW(roc_auc({{0.1, 1}, {0.2, 1}}), DatasetError);
  EXPECT_THROW(roc_auc({{0.1, -1}}), DatasetError);
  EXPECT_THROW(roc_auc({}), DatasetError);
}

TEST(Youden, MatchesExhaustiveSearch) {
  Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    auto s = random_scores(rng, 2 + rng.index(49), 1 + static_cast<int>(rng.index(10)));
    YoudenPoint y = youden_threshold(roc_auc(s));
    auto [t, j] = oracle::exhaustive_youden(s);
    EXPECT_EQ(y.threshold, t);
    EXPECT_NEAR(y.j, j, 1e-12);
  }
}

TEST(Youden, TieGoesToHigherThreshold) {
  // J = 0.5 at both 0.8 and 0.4.
  std::vector<ScoredLabel> s{{0.8, 1}, {0.6, -1}, {0.4, 1}, {0.2, -1}};
  YoudenPoint y = youden_threshold(roc_auc(s));
  EXPECT_EQ(y.threshold, 0.8);
  EXPECT_DOUBLE_EQ(y.j, 0.5);
}

TEST(Roc, CsvOutput) {
  std::ostringstream out;
  write_roc_csv(out, roc_auc({{0.75, 1}, {0.25, -1}}));
  EXPECT_EQ(out.str(), "threshold,fpr,tpr\ninf,0,0\n0.75,0,1\n0.25,1,1\n");
}

TEST(Calibration, Values) {
  EXPECT_EQ(calibrate(3, 3), 1.0);
  EXPECT_DOUBLE_EQ(calibrate(1, 3), std::exp(-2.0));
  EXPECT_DOUBLE_EQ(calibrate(0, 50), std::exp(-50.0));
  EXPECT_DOUBLE_EQ(final_score(0.9, calibrate(2, 1)), 0.9 * std::exp(-1.0));
}

TEST(Calibration, ExhaustiveProperties) {
  for (std::int64_t a = 0; a <= 50; ++a) {
    for (std::int64_t b = 0; b <= 50; ++b) {
      double s = calibrate(a, b);
      EXPECT_EQ(s, calibrate(b, a));
      EXPECT_GT(s, 0.0);
      EXPECT_LE(s, 1.0);
      EXPECT_EQ(s == 1.0, a == b);
      if (b < 50) {
        EXPECT_EQ(calibrate(a, b + 1) < s, b >= a);
      }
    }
  }
}

TEST(Calibration, CalleeCountUsesInlineFilter) {
  FunctionAst f;
  f.callees = {{"a", 0}, {"b", 4}, {"c", 5}, {"d", 40}};
  EXPECT_EQ(callee_count(f), 2);
  EXPECT_EQ(callee_count(f, 0), 4);
  EXPECT_EQ(callee_count(f, 41), 0);
}

}  // namespace
}  // namespace astsim
