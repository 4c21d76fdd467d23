// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "fedkge/eval/evaluate.hpp"
#include "fedkge/kg/triple_store.hpp"
#include "fedkge/rng.hpp"

namespace fedkge::fusion {

// Linear combiner over two frozen scorers for the same client vocabulary:
//   s(h,r,t) = w0 * f_a(h,r,t) + w1 * f_b(h,r,t) + bias
// Initialized to the plain average of both scorers.
struct FusionModel {
  std::array<double, 2> weight{0.5, 0.5};
  double bias = 0.0;
  const eval::Scorer* scorer_a = nullptr;  // single-setting scores
  const eval::Scorer* scorer_b = nullptr;  // federated-setting scores
};

double fused_score(const FusionModel& model, const kg::Triple& triple);

// Scorer adapter so fused models plug into the ranking machinery unchanged.
class FusionScorer final : public eval::Scorer {
 public:
  explicit FusionScorer(const FusionModel& model) : model_(model) {
    if (model.scorer_a == nullptr || model.scorer_b == nullptr)
      throw std::invalid_argument("FusionScorer: missing component scorer");
    if (model.scorer_a->entity_count() != model.scorer_b->entity_count())
      throw std::invalid_argument("FusionScorer: component vocabularies differ");
  }
  int32_t entity_count() const override { return model_.scorer_a->entity_count(); }
  double score_one(int32_t head, int32_t relation, int32_t tail) const override {
    return fused_score(model_, {head, relation, tail});
  }

 private:
  const FusionModel& model_;
};

struct FusionConfig {
  double margin = 10.0;  // beta
  int neg_per_pos = 1;
  int epochs = 100;
  double learning_rate = 0.01;
  int batch_size = 512;
};

// Fits (weight, bias) on `triples` with the margin ranking loss
//   max(0, margin - s_pos + s_neg)
// against uniform head-or-tail corruptions, component scorers frozen. The
// bias cancels in every loss term, so only the weights move.
void train_fusion(FusionModel& model, std::span<const kg::Triple> triples,
                  const FusionConfig& config, Rng& rng);

}  // namespace fedkge::fusion
