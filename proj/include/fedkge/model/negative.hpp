// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedkge/kg/triple_store.hpp"
#include "fedkge/rng.hpp"

namespace fedkge::model {

enum class CorruptionMode {
  Both,      // alternate tail/head by batch position (even -> tail)
  TailOnly,  // strict (h, r, t') form
};

// Corrupted entity ids for a batch of positives. Negative j of positive i
// lives at replacements[i * neg_per_pos + j]; head_corrupted[i] says which
// side was replaced for that positive.
struct NegativeBatch {
  int neg_per_pos = 0;
  std::vector<int32_t> replacements;
  std::vector<uint8_t> head_corrupted;

  kg::Triple materialize(const kg::Triple& positive, size_t pos_index, int j) const {
    const int32_t repl = replacements[pos_index * static_cast<size_t>(neg_per_pos) +
                         static_cast<size_t>(j)];
    if (head_corrupted[pos_index]) return {repl, positive.relation, positive.tail};
    return {positive.head, positive.relation, repl};
  }
};

struct NegativeSamplerConfig {
  CorruptionMode mode = CorruptionMode::Both;
  // When set, resample draws that form a known triple of `filter` (not just
  // the positive itself). Bounded retries; falls back to any id != original.
  bool strict = false;
};

// Uniform corruption over [0, entity_count). A draw equal to the replaced
// entity is rejected and resampled; entity_count must be >= 2.
NegativeBatch sample_negatives(std::span<const kg::Triple> positives, int32_t entity_count,
                               int neg_per_pos, const NegativeSamplerConfig& config, Rng& rng,
                               const kg::FilterIndex* filter = nullptr);

}  // namespace fedkge::model
