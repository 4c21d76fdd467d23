// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/fusion/fusion.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fedkge::fusion {

double fused_score(const FusionModel& model, const kg::Triple& triple) {
  const double fa = model.scorer_a->score_one(triple.head, triple.relation, triple.tail);
  const double fb = model.scorer_b->score_one(triple.head, triple.relation, triple.tail);
  return model.weight[0] * fa + model.weight[1] * fb + model.bias;
}

void train_fusion(FusionModel& model, std::span<const kg::Triple> triples,
                  const FusionConfig& config, Rng& rng) {
  if (model.scorer_a == nullptr || model.scorer_b == nullptr)
    throw std::invalid_argument("train_fusion: missing component scorer");
  if (triples.empty()) return;
  const int32_t n_entities = model.scorer_a->entity_count();
  if (n_entities < 2) throw std::invalid_argument("train_fusion: need >= 2 entities");

  const auto features = [&](const kg::Triple& t) {
    return std::array<double, 2>{
        model.scorer_a->score_one(t.head, t.relation, t.tail),
        model.scorer_b->score_one(t.head, t.relation, t.tail)};
  };

  std::vector<size_t> order(triples.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<size_t>(order));
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(config.batch_size)) {
      const size_t end =
          std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      double g0 = 0.0, g1 = 0.0;
      for (size_t i = start; i < end; ++i) {
        const kg::Triple& pos = triples[order[i]];
        for (int j = 0; j < config.neg_per_pos; ++j) {
          // Uniform corruption of head or tail, resampled off the original.
          const bool corrupt_head = rng.below(2) == 1;
          const int32_t original = corrupt_head ? pos.head : pos.tail;
          int32_t repl = original;
          while (repl == original)
            repl = static_cast<int32_t>(rng.below(static_cast<uint64_t>(n_entities)));
          const kg::Triple neg = corrupt_head ? kg::Triple{repl, pos.relation, pos.tail}
                                              : kg::Triple{pos.head, pos.relation, repl};
          const auto x_pos = features(pos);
          const auto x_neg = features(neg);
          const double s_pos =
              model.weight[0] * x_pos[0] + model.weight[1] * x_pos[1] + model.bias;
          const double s_neg =
              model.weight[0] * x_neg[0] + model.weight[1] * x_neg[1] + model.bias;
          if (config.margin - s_pos + s_neg > 0.0) {
            g0 += x_neg[0] - x_pos[0];
            g1 += x_neg[1] - x_pos[1];
          }
        }
      }
      const double scale =
          config.learning_rate / static_cast<double>((end - start) *
                                                     static_cast<size_t>(config.neg_per_pos));
      model.weight[0] -= scale * g0;
      model.weight[1] -= scale * g1;
    }
  }
}

}  // namespace fedkge::fusion
