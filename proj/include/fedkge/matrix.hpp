// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fedkge/rng.hpp"

namespace fedkge {

// Dense row-major matrix of doubles. Rows are embedding vectors; complex
// models interpret a row as interleaved (re, im) pairs.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(int64_t rows, int64_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows * cols), fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("EmbeddingMatrix: negative shape");
  }

  static EmbeddingMatrix uniform(int64_t rows, int64_t cols, double lo, double hi, Rng& rng) {
    EmbeddingMatrix m(rows, cols);
    for (double& v : m.data_) v = rng.uniform(lo, hi);
    return m;
  }

  int64_t rows() const { return rows_; }
  int64_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  std::span<double> row(int64_t i) {
    check_row(i);
    return {data_.data() + i * cols_, static_cast<size_t>(cols_)};
  }
  std::span<const double> row(int64_t i) const {
    check_row(i);
    return {data_.data() + i * cols_, static_cast<size_t>(cols_)};
  }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool operator==(const EmbeddingMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  void check_row(int64_t i) const {
    if (i < 0 || i >= rows_) throw std::out_of_range("EmbeddingMatrix: row out of range");
  }

  int64_t rows_ = 0;
  int64_t cols_ = 0;
  std::vector<double> data_;
};

// New matrix whose row j is source.row(map[j]).
inline EmbeddingMatrix gather_rows(const EmbeddingMatrix& source, std::span<const int32_t> map) {
  EmbeddingMatrix out(static_cast<int64_t>(map.size()), source.cols());
  for (size_t j = 0; j < map.size(); ++j) {
    auto src = source.row(map[j]);
    auto dst = out.row(static_cast<int64_t>(j));
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

}  // namespace fedkge
