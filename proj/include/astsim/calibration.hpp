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

// Callee-count calibration of the learned AST similarity.

#pragma once

#include <cmath>
#include <cstdint>

#include "astsim/ast.hpp"

namespace astsim {

// Inlining filter threshold, in instruction-count proxy units.
inline constexpr std::int64_t kDefaultInlineBeta = 5;

// Number of callees that survive the inlining filter (size >= beta).
inline std::int64_t callee_count(const FunctionAst& ast,
                                 std::int64_t inline_beta = kDefaultInlineBeta) {
  std::int64_t count = 0;
  for (const Callee& c : ast.callees) {
    if (c.size >= inline_beta) ++count;
  }
  return count;
}

// S(c1, c2) = exp(-|c1 - c2|), in (0, 1].
inline double calibrate(std::int64_t c1, std::int64_t c2) {
  auto diff = c1 > c2 ? c1 - c2 : c2 - c1;
  return std::exp(-static_cast<double>(diff));
}

// F = M * S.
inline double final_score(double ast_similarity, double calibration) {
  return ast_similarity * calibration;
}

}  // namespace astsim
