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

// Dense float64 vectors and row-major matrices with checked kernels.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "astsim/error.hpp"

namespace astsim {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  void fill(double v) { std::fill(values_.begin(), values_.end(), v); }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

namespace nn {

inline double sigmoid(double x) {
  // Split on sign so exp never overflows.
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

inline void check_dims(bool ok, const char* op) {
  if (!ok) throw DimensionError(std::string("dimension mismatch in ") + op);
}

// y += M x
inline void gemv_acc(std::span<double> y, const Matrix& m, std::span<const double> x) {
  check_dims(m.rows() == y.size() && m.cols() == x.size(), "gemv_acc");
  const std::size_t cols = m.cols();
  const double* a = m.values().data();
  for (std::size_t r = 0; r < y.size(); ++r) {
    const double* row = a + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
    y[r] += s;
  }
}

// y += M^T x
inline void gemv_t_acc(std::span<double> y, const Matrix& m, std::span<const double> x) {
  check_dims(m.cols() == y.size() && m.rows() == x.size(), "gemv_t_acc");
  const std::size_t cols = m.cols();
  const double* a = m.values().data();
  for (std::size_t r = 0; r < x.size(); ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    const double* row = a + r * cols;
    for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * xr;
  }
}

// M += a b^T
inline void outer_acc(Matrix& m, std::span<const double> a, std::span<const double> b) {
  check_dims(m.rows() == a.size() && m.cols() == b.size(), "outer_acc");
  const std::size_t cols = m.cols();
  double* out = m.values().data();
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double ar = a[r];
    if (ar == 0.0) continue;
    double* row = out + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] += ar * b[c];
  }
}

// y += x
inline void add_to(std::span<double> y, std::span<const double> x) {
  check_dims(y.size() == x.size(), "add_to");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += x[i];
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace nn
}  // namespace astsim
