// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/model/negative.hpp"

#include <stdexcept>

namespace fedkge::model {

NegativeBatch sample_negatives(std::span<const kg::Triple> positives, int32_t entity_count,
                               int neg_per_pos, const NegativeSamplerConfig& config, Rng& rng,
                               const kg::FilterIndex* filter) {
  if (entity_count < 2) throw std::invalid_argument("sample_negatives: need >= 2 entities");
  if (neg_per_pos < 1) throw std::invalid_argument("sample_negatives: neg_per_pos must be >= 1");
  if (config.strict && filter == nullptr)
    throw std::invalid_argument("sample_negatives: strict mode needs a filter index");

  NegativeBatch batch;
  batch.neg_per_pos = neg_per_pos;
  batch.replacements.resize(positives.size() * static_cast<size_t>(neg_per_pos));
  batch.head_corrupted.resize(positives.size());

  constexpr int kStrictRetries = 100;
  for (size_t i = 0; i < positives.size(); ++i) {
    const kg::Triple& pos = positives[i];
    const bool corrupt_head =
        config.mode == CorruptionMode::Both ? (i % 2 == 1) : false;
    batch.head_corrupted[i] = corrupt_head ? 1 : 0;
    const int32_t original = corrupt_head ? pos.head : pos.tail;

    for (int j = 0; j < neg_per_pos; ++j) {
      int32_t draw = original;
      int tries = 0;
      while (true) {
        draw = static_cast<int32_t>(rng.below(static_cast<uint64_t>(entity_count)));
        if (draw == original) continue;
        if (config.strict && tries++ < kStrictRetries) {
          const kg::Triple cand = corrupt_head
                                      ? kg::Triple{draw, pos.relation, pos.tail}
                                      : kg::Triple{pos.head, pos.relation, draw};
          if (filter->contains(cand)) continue;
        }
        break;
      }
      batch.replacements[i * static_cast<size_t>(neg_per_pos) + static_cast<size_t>(j)] = draw;
    }
  }
  return batch;
}

}  // namespace fedkge::model
