// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "fedkge/matrix.hpp"
#include "fedkge/model/model.hpp"
#include "fedkge/model/negative.hpp"

namespace fedkge::model {

// Sparse row-gradient: only rows a batch touched, in first-touch order.
class SparseRows {
 public:
  SparseRows() = default;
  explicit SparseRows(int64_t dim) : dim_(dim) {}

  std::span<double> row(int32_t id);                // inserts a zero row on first touch
  std::span<const double> row_if_present(int32_t id) const;  // empty if untouched
  const std::vector<int32_t>& ids() const { return ids_; }
  size_t size() const { return ids_.size(); }
  int64_t dim() const { return dim_; }
  void clear();

 private:
  int64_t dim_ = 0;
  std::vector<int32_t> ids_;
  std::vector<double> data_;
  std::unordered_map<int32_t, size_t> index_;
};

// Softmax of alpha * scores with max-subtraction; nonnegative, sums to 1.
// Callers treat the result as constants (no gradient flows through it).
std::vector<double> adversarial_weights(std::span<const double> scores, double alpha);

// Numerically stable -log sigmoid(x) = softplus(-x).
double neg_log_sigmoid(double x);
double sigmoid(double x);

struct BatchTerms {
  double loss = 0.0;         // mean per-triple loss over the batch
  size_t triples = 0;
};

// Per-positive loss
//   L = -log sigmoid(f(pos) - margin)
//       - sum_j p_j log sigmoid(margin - f(neg_j))
// with p_j the detached self-adversarial weights of that positive's
// negatives. Batch loss is the mean over positives.
BatchTerms batch_loss(const ModelSpec& spec, const TrainHyper& hyper,
                      std::span<const kg::Triple> positives, const NegativeBatch& negatives,
                      const EmbeddingMatrix& entities, const EmbeddingMatrix& relations);

// Same value, plus exact partial derivatives with respect to every touched
// entity/relation row (mean scaling included). Untouched rows are absent.
BatchTerms batch_loss_grad(const ModelSpec& spec, const TrainHyper& hyper,
                           std::span<const kg::Triple> positives, const NegativeBatch& negatives,
                           const EmbeddingMatrix& entities, const EmbeddingMatrix& relations,
                           SparseRows& entity_grad, SparseRows& relation_grad);

}  // namespace fedkge::model
