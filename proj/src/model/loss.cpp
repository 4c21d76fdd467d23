// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/model/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fedkge::model {

std::span<double> SparseRows::row(int32_t id) {
  auto it = index_.find(id);
  if (it == index_.end()) {
    it = index_.emplace(id, ids_.size()).first;
    ids_.push_back(id);
    data_.resize(data_.size() + static_cast<size_t>(dim_), 0.0);
  }
  return {data_.data() + it->second * static_cast<size_t>(dim_), static_cast<size_t>(dim_)};
}

std::span<const double> SparseRows::row_if_present(int32_t id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return {};
  return {data_.data() + it->second * static_cast<size_t>(dim_), static_cast<size_t>(dim_)};
}

void SparseRows::clear() {
  ids_.clear();
  data_.clear();
  index_.clear();
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double neg_log_sigmoid(double x) {
  // softplus(-x) = log(1 + exp(-x)), computed without overflow
  if (x > 0.0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

std::vector<double> adversarial_weights(std::span<const double> scores, double alpha) {
  if (scores.empty()) throw std::invalid_argument("adversarial_weights: empty score list");
  std::vector<double> w(scores.size());
  double max_term = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < scores.size(); ++i) {
    w[i] = alpha * scores[i];
    max_term = std::max(max_term, w[i]);
  }
  double total = 0.0;
  for (double& v : w) {
    v = std::exp(v - max_term);
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

namespace {

struct Rows {
  const EmbeddingMatrix& entities;
  const EmbeddingMatrix& relations;
  std::span<const double> ent(int32_t id) const { return entities.row(id); }
  std::span<const double> rel(int32_t id) const { return relations.row(id); }
};

template <bool WithGrad>
BatchTerms run_batch(const ModelSpec& spec, const TrainHyper& hyper,
                     std::span<const kg::Triple> positives, const NegativeBatch& negatives,
                     const EmbeddingMatrix& entities, const EmbeddingMatrix& relations,
                     SparseRows* entity_grad, SparseRows* relation_grad) {
  if (positives.empty()) return {};
  if (negatives.head_corrupted.size() != positives.size())
    throw std::invalid_argument("batch_loss: negatives do not match positives");

  const Rows rows{entities, relations};
  const double inv_batch = 1.0 / static_cast<double>(positives.size());
  const int n_neg = negatives.neg_per_pos;

  double total = 0.0;
  std::vector<double> neg_scores(static_cast<size_t>(n_neg));
  for (size_t i = 0; i < positives.size(); ++i) {
    const kg::Triple& pos = positives[i];
    const double pos_score = score(spec, rows.ent(pos.head), rows.rel(pos.relation),
                                   rows.ent(pos.tail));
    total += neg_log_sigmoid(pos_score - hyper.margin);

    for (int j = 0; j < n_neg; ++j) {
      const kg::Triple neg = negatives.materialize(pos, i, j);
      neg_scores[static_cast<size_t>(j)] =
          score(spec, rows.ent(neg.head), rows.rel(neg.relation), rows.ent(neg.tail));
    }
    const std::vector<double> weights = adversarial_weights(neg_scores, hyper.adv_temperature);
    for (int j = 0; j < n_neg; ++j)
      total += weights[static_cast<size_t>(j)] *
               neg_log_sigmoid(hyper.margin - neg_scores[static_cast<size_t>(j)]);

    if constexpr (WithGrad) {
      // Inserting a row may reallocate the gradient storage, so both rows of
      // a triple are created before any span into them is taken.
      const auto grad_into = [&](const kg::Triple& triple, double upstream) {
        entity_grad->row(triple.head);
        entity_grad->row(triple.tail);
        relation_grad->row(triple.relation);
        accumulate_score_grad(spec, rows.ent(triple.head), rows.rel(triple.relation),
                              rows.ent(triple.tail), upstream, entity_grad->row(triple.head),
                              relation_grad->row(triple.relation),
                              entity_grad->row(triple.tail));
      };
      // dL/ds_pos = sigmoid(s - margin) - 1; dL/ds_neg_j = p_j sigmoid(s_j - margin)
      grad_into(pos, (sigmoid(pos_score - hyper.margin) - 1.0) * inv_batch);
      for (int j = 0; j < n_neg; ++j) {
        grad_into(negatives.materialize(pos, i, j),
                  weights[static_cast<size_t>(j)] *
                      sigmoid(neg_scores[static_cast<size_t>(j)] - hyper.margin) * inv_batch);
      }
    }
  }

  return {total * inv_batch, positives.size()};
}

}  // namespace

BatchTerms batch_loss(const ModelSpec& spec, const TrainHyper& hyper,
                      std::span<const kg::Triple> positives, const NegativeBatch& negatives,
                      const EmbeddingMatrix& entities, const EmbeddingMatrix& relations) {
  return run_batch<false>(spec, hyper, positives, negatives, entities, relations, nullptr,
                          nullptr);
}

BatchTerms batch_loss_grad(const ModelSpec& spec, const TrainHyper& hyper,
                           std::span<const kg::Triple> positives, const NegativeBatch& negatives,
                           const EmbeddingMatrix& entities, const EmbeddingMatrix& relations,
                           SparseRows& entity_grad, SparseRows& relation_grad) {
  if (entity_grad.dim() != entities.cols() || relation_grad.dim() != relations.cols())
    throw std::invalid_argument("batch_loss_grad: gradient row width mismatch");
  return run_batch<true>(spec, hyper, positives, negatives, entities, relations, &entity_grad,
                         &relation_grad);
}

}  // namespace fedkge::model
