// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/fed/client.hpp"

#include <iostream>
#include <numeric>
#include <stdexcept>

#include "fedkge/fed/messages.hpp"

namespace fedkge::fed {

LocalTrainer::LocalTrainer(const kg::ClientShard& shard, const TrainSettings& settings,
                           EmbeddingMatrix& entities, EmbeddingMatrix& relations,
                           optim::OptimizerState& entity_opt,
                           optim::OptimizerState& relation_opt, Rng& rng,
                           const std::vector<int32_t>* entity_map,
                           const std::vector<int32_t>* relation_map,
                           const kg::FilterIndex* strict_filter)
    : shard_(shard),
      settings_(settings),
      entities_(entities),
      relations_(relations),
      entity_opt_(entity_opt),
      relation_opt_(relation_opt),
      rng_(rng),
      entity_map_(entity_map),
      relation_map_(relation_map),
      strict_filter_(strict_filter),
      entity_grad_(entities.cols()),
      relation_grad_(relations.cols()) {
  order_.resize(shard.train.size());
  std::iota(order_.begin(), order_.end(), size_t{0});
}

double LocalTrainer::run_epochs(int epochs) {
  double last = 0.0;
  for (int e = 0; e < epochs; ++e) last = run_one_epoch();
  return last;
}

double LocalTrainer::run_one_epoch() {
  const auto& train = shard_.train.triples();
  if (train.empty()) return 0.0;
  // Fresh identity permutation each epoch: the epoch order depends only on
  // the rng stream, not on how many epochs this trainer instance has run.
  std::iota(order_.begin(), order_.end(), size_t{0});
  rng_.shuffle(std::span<size_t>(order_));

  const int32_t local_entities = shard_.vocab.entities.size();
  const size_t batch_size = static_cast<size_t>(settings_.batch_size);
  double loss_sum = 0.0;
  size_t batches = 0;

  std::vector<kg::Triple> positives;
  positives.reserve(batch_size);
  for (size_t start = 0; start < train.size(); start += batch_size) {
    const size_t end = std::min(train.size(), start + batch_size);
    positives.clear();
    for (size_t i = start; i < end; ++i) positives.push_back(train[order_[i]]);

    model::NegativeBatch negatives =
        model::sample_negatives(positives, local_entities, settings_.hyper.neg_per_pos,
                                settings_.sampler, rng_, strict_filter_);

    // Translate local ids to parameter rows when training inside global
    // matrices; identity otherwise.
    if (entity_map_ != nullptr || relation_map_ != nullptr) {
      for (kg::Triple& t : positives) {
        if (entity_map_ != nullptr) {
          t.head = (*entity_map_)[static_cast<size_t>(t.head)];
          t.tail = (*entity_map_)[static_cast<size_t>(t.tail)];
        }
        if (relation_map_ != nullptr)
          t.relation = (*relation_map_)[static_cast<size_t>(t.relation)];
      }
      if (entity_map_ != nullptr)
        for (int32_t& r : negatives.replacements) r = (*entity_map_)[static_cast<size_t>(r)];
    }

    entity_grad_.clear();
    relation_grad_.clear();
    const model::BatchTerms terms =
        model::batch_loss_grad(settings_.spec, settings_.hyper, positives, negatives, entities_,
                               relations_, entity_grad_, relation_grad_);
    entity_opt_.step(entities_, entity_grad_, settings_.optimizer);
    relation_opt_.step(relations_, relation_grad_, settings_.optimizer);
    loss_sum += terms.loss;
    ++batches;
  }
  return loss_sum / static_cast<double>(batches);
}

std::vector<ClientState> make_clients(const kg::FederatedDataset& dataset,
                                      const TrainSettings& settings, uint64_t seed) {
  model::validate_spec(settings.spec, settings.hyper.embedding_dim);
  std::vector<ClientState> clients;
  clients.reserve(dataset.clients.size());
  for (const kg::ClientShard& shard : dataset.clients) {
    ClientState c;
    c.id = shard.id;
    c.shard = &shard;
    c.settings = settings;
    Rng rel_rng(derive_seed(seed, "relations", static_cast<uint64_t>(shard.id)));
    c.relations = model::init_relation_matrix(settings.spec, shard.vocab.relations.size(),
                                              settings.hyper.embedding_dim, rel_rng);
    c.entities = EmbeddingMatrix(shard.vocab.entities.size(), settings.hyper.embedding_dim);
    c.entity_opt = optim::OptimizerState(c.entities.rows(), c.entities.cols());
    c.relation_opt = optim::OptimizerState(c.relations.rows(), c.relations.cols());
    c.rng = Rng(derive_seed(seed, "train", static_cast<uint64_t>(shard.id)));
    c.full_filter.add_all(shard.train.triples());
    c.full_filter.add_all(shard.valid.triples());
    c.full_filter.add_all(shard.test.triples());
    c.full_filter.finalize();
    clients.push_back(std::move(c));
  }
  return clients;
}

std::vector<uint8_t> make_register_payload(const ClientState& client) {
  RegisterMessage msg;
  msg.client = static_cast<uint32_t>(client.id);
  msg.entity_labels = client.shard->vocab.entities.labels();
  return encode(msg);
}

EmbeddingMatrix client_update(ClientState& client, const EmbeddingMatrix& incoming, int epochs) {
  if (incoming.rows() != client.shard->vocab.entities.size() ||
      incoming.cols() != client.settings.hyper.embedding_dim)
    throw std::invalid_argument("client_update: incoming matrix shape mismatch");

  client.entities = incoming;
  if (client.shard->train.empty()) {
    std::cerr << "warning: client " << client.id << " has no training triples; skipping update\n";
    return client.entities;
  }
  if (client.settings.reset_optimizer_each_round) {
    client.entity_opt.reset();
    client.relation_opt.reset();
  }

  LocalTrainer trainer(*client.shard, client.settings, client.entities, client.relations,
                       client.entity_opt, client.relation_opt, client.rng, nullptr, nullptr,
                       client.settings.sampler.strict ? &client.full_filter : nullptr);
  trainer.run_epochs(epochs);
  return client.entities;
}

}  // namespace fedkge::fed
