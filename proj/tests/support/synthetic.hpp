// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
//
// Learnable synthetic knowledge graphs for desk-scale experiments. Entities
// get latent 2D positions; each relation is a latent translation, and
// (h, r, t) holds when z_t lands within a capture radius of z_h + delta_r.
// A translation model can fit this family exactly, so held-out triples are
// predictable from the training ones.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fedkge/kg/federate.hpp"
#include "fedkge/kg/triple_store.hpp"
#include "fedkge/rng.hpp"

namespace fedkge::testsupport {

struct SyntheticConfig {
  int entities = 200;
  int relations = 12;
  int triples = 2000;
  // Number of distinct translation offsets; relations beyond this reuse
  // earlier offsets round-robin. Redundant relations spread the same latent
  // signal across clients, which narrows the federated advantage.
  int distinct_offsets = 12;
  double min_offset = 0.15;
  double max_offset = 0.35;
  double radius = 0.10;
  // Homogeneous mode: offsets of equal magnitude at evenly spread angles and
  // an equal triple budget per relation, so no client draws a structurally
  // easier shard than another.
  bool homogeneous = false;
  uint64_t seed = 1;
};

struct SyntheticKg {
  kg::TripleStore store;
  kg::Vocabulary vocab;
};

inline SyntheticKg make_synthetic_kg(const SyntheticConfig& config) {
  Rng rng(derive_seed(config.seed, "synthetic-kg"));

  std::vector<std::pair<double, double>> position(static_cast<size_t>(config.entities));
  for (auto& [x, y] : position) {
    x = rng.uniform();
    y = rng.uniform();
  }
  const size_t n_distinct =
      static_cast<size_t>(std::max(1, std::min(config.distinct_offsets, config.relations)));
  std::vector<std::pair<double, double>> distinct(n_distinct);
  for (size_t k = 0; k < n_distinct; ++k) {
    const double angle =
        config.homogeneous
            ? (2.0 * 3.14159265358979323846 * static_cast<double>(k)) /
                      static_cast<double>(n_distinct) +
                  rng.uniform(-0.1, 0.1)
            : rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    const double magnitude =
        config.homogeneous ? 0.5 * (config.min_offset + config.max_offset)
                           : rng.uniform(config.min_offset, config.max_offset);
    distinct[k] = {magnitude * std::cos(angle), magnitude * std::sin(angle)};
  }
  std::vector<std::pair<double, double>> offset(static_cast<size_t>(config.relations));
  for (size_t r = 0; r < offset.size(); ++r) offset[r] = distinct[r % distinct.size()];

  std::vector<kg::Triple> triples;
  kg::FilterIndex seen;
  const int64_t max_attempts = static_cast<int64_t>(config.triples) * 200;
  for (int64_t attempt = 0;
       attempt < max_attempts && static_cast<int>(triples.size()) < config.triples; ++attempt) {
    const auto r = config.homogeneous
                       ? static_cast<int32_t>(triples.size() %
                                              static_cast<size_t>(config.relations))
                       : static_cast<int32_t>(rng.below(static_cast<uint64_t>(config.relations)));
    const auto h = static_cast<int32_t>(rng.below(static_cast<uint64_t>(config.entities)));
    const double tx = position[static_cast<size_t>(h)].first + offset[static_cast<size_t>(r)].first;
    const double ty = position[static_cast<size_t>(h)].second + offset[static_cast<size_t>(r)].second;
    if (tx < 0.0 || tx > 1.0 || ty < 0.0 || ty > 1.0) continue;

    std::vector<int32_t> captured;
    for (int32_t e = 0; e < config.entities; ++e) {
      const double dx = position[static_cast<size_t>(e)].first - tx;
      const double dy = position[static_cast<size_t>(e)].second - ty;
      if (dx * dx + dy * dy <= config.radius * config.radius) captured.push_back(e);
    }
    if (captured.empty()) continue;
    const int32_t t = captured[rng.below(captured.size())];
    const kg::Triple triple{h, r, t};
    if (seen.contains(triple)) continue;
    seen.add(triple);
    triples.push_back(triple);
  }

  SyntheticKg out;
  for (int32_t e = 0; e < config.entities; ++e) out.vocab.entities.add("e" + std::to_string(e));
  for (int32_t r = 0; r < config.relations; ++r) out.vocab.relations.add("r" + std::to_string(r));
  out.store = kg::TripleStore(std::move(triples));
  return out;
}

inline kg::FederatedDataset make_synthetic_federated(const SyntheticConfig& config,
                                                     int clients, uint64_t split_seed) {
  const SyntheticKg synth = make_synthetic_kg(config);
  return kg::federate_split(synth.store, synth.vocab, clients, {}, split_seed);
}

// Fraction of either client's entities shared with the other, the smaller of
// the two views.
inline double entity_overlap(const kg::ClientShard& a, const kg::ClientShard& b) {
  size_t shared = 0;
  for (const std::string& label : a.vocab.entities.labels())
    if (b.vocab.entities.find(label)) ++shared;
  const size_t denom = std::max<size_t>(
      1, std::min(a.vocab.entities.labels().size(), b.vocab.entities.labels().size()));
  return static_cast<double>(shared) / static_cast<double>(denom);
}

}  // namespace fedkge::testsupport
