// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "fedkge/kg/federate.hpp"
#include "fedkge/matrix.hpp"
#include "fedkge/model/loss.hpp"
#include "fedkge/model/model.hpp"
#include "fedkge/model/negative.hpp"
#include "fedkge/optim/optimizer.hpp"
#include "fedkge/rng.hpp"

namespace fedkge::fed {

// Everything a local training run needs beyond the data itself.
struct TrainSettings {
  model::ModelSpec spec;
  model::TrainHyper hyper;
  optim::OptimizerConfig optimizer;
  model::NegativeSamplerConfig sampler;
  int batch_size = 512;
  bool reset_optimizer_each_round = false;
};

// Mini-batch trainer over one shard's train split. Parameters may be
// client-shaped (maps null) or rows inside global matrices (maps translate
// local ids to rows). Either way the arithmetic is identical, which is what
// makes the pooled setting decompose exactly on disjoint shards.
class LocalTrainer {
 public:
  LocalTrainer(const kg::ClientShard& shard, const TrainSettings& settings,
               EmbeddingMatrix& entities, EmbeddingMatrix& relations,
               optim::OptimizerState& entity_opt, optim::OptimizerState& relation_opt, Rng& rng,
               const std::vector<int32_t>* entity_map = nullptr,
               const std::vector<int32_t>* relation_map = nullptr,
               const kg::FilterIndex* strict_filter = nullptr);

  // Runs full shuffled epochs; returns the mean batch loss of the last epoch
  // (0 when the shard has no training triples).
  double run_epochs(int epochs);

 private:
  double run_one_epoch();

  const kg::ClientShard& shard_;
  const TrainSettings& settings_;
  EmbeddingMatrix& entities_;
  EmbeddingMatrix& relations_;
  optim::OptimizerState& entity_opt_;
  optim::OptimizerState& relation_opt_;
  Rng& rng_;
  const std::vector<int32_t>* entity_map_;
  const std::vector<int32_t>* relation_map_;
  const kg::FilterIndex* strict_filter_;

  std::vector<size_t> order_;
  model::SparseRows entity_grad_;
  model::SparseRows relation_grad_;
};

// One client of the protocol: its shard, its private relation embeddings,
// its slice of entity embeddings, optimizer state and RNG stream.
struct ClientState {
  int32_t id = 0;
  const kg::ClientShard* shard = nullptr;
  TrainSettings settings;
  EmbeddingMatrix entities;   // n_c x d
  EmbeddingMatrix relations;  // m_c x d_r (never leaves the client)
  optim::OptimizerState entity_opt;
  optim::OptimizerState relation_opt;
  Rng rng;
  kg::FilterIndex full_filter;  // train + valid + test, local ids
};

// Builds client states for a dataset. Relation matrices come from the
// per-client "relations" stream; entity matrices start empty and are filled
// by the first DISTRIBUTE.
std::vector<ClientState> make_clients(const kg::FederatedDataset& dataset,
                                      const TrainSettings& settings, uint64_t seed);

// The client's REGISTER payload: its entity labels, nothing else.
std::vector<uint8_t> make_register_payload(const ClientState& client);

// Replaces the local entity matrix with `incoming`, then trains for `epochs`
// shuffled epochs at the client's batch size. An empty train shard warns and
// returns `incoming` unchanged. Returns the resulting entity matrix.
EmbeddingMatrix client_update(ClientState& client, const EmbeddingMatrix& incoming, int epochs);

}  // namespace fedkge::fed
