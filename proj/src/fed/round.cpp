// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/fed/round.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace fedkge::fed {

std::vector<int32_t> run_round(ServerState& server, std::span<ClientState> clients,
                               const RoundConfig& config, int threads) {
  const int32_t total = static_cast<int32_t>(clients.size());
  if (total == 0) throw std::invalid_argument("run_round: no clients");
  if (config.client_fraction <= 0.0 || config.client_fraction > 1.0)
    throw std::invalid_argument("run_round: client fraction must be in (0, 1]");

  const int32_t k = std::min<int32_t>(
      total, static_cast<int32_t>(std::ceil(config.client_fraction * total)));

  // Distinct uniform sample: partial Fisher-Yates over the id list.
  std::vector<int32_t> ids(static_cast<size_t>(total));
  std::iota(ids.begin(), ids.end(), 0);
  for (int32_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<int32_t>(
                           server.selection_rng.below(static_cast<uint64_t>(total - i)));
    std::swap(ids[static_cast<size_t>(i)], ids[static_cast<size_t>(j)]);
  }
  std::vector<int32_t> selected(ids.begin(), ids.begin() + k);
  std::sort(selected.begin(), selected.end());

  // Ship entity slices out, train, ship updates back. All traffic passes
  // through the message encoding so a wire transport changes only the
  // carrier.
  std::vector<std::vector<uint8_t>> outbound(selected.size());
  for (size_t i = 0; i < selected.size(); ++i) {
    const int32_t c = selected[i];
    outbound[i] = encode(MatrixMessage{MessageType::Distribute,
                                       static_cast<uint64_t>(server.round),
                                       static_cast<uint32_t>(c), distribute(server, c)});
  }

  std::vector<std::vector<uint8_t>> inbound(selected.size());
  const auto worker = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const int32_t c = selected[i];
      const MatrixMessage incoming = decode_matrix_message(outbound[i]);
      EmbeddingMatrix updated =
          client_update(clients[static_cast<size_t>(c)], incoming.matrix, config.local_epochs);
      inbound[i] = encode(MatrixMessage{MessageType::Update, incoming.round,
                                        static_cast<uint32_t>(c), std::move(updated)});
    }
  };
  if (threads <= 1 || selected.size() < 2) {
    worker(0, selected.size());
  } else {
    const size_t n_workers = std::min<size_t>(static_cast<size_t>(threads), selected.size());
    std::vector<std::thread> pool;
    const size_t chunk = (selected.size() + n_workers - 1) / n_workers;
    for (size_t w = 0; w < n_workers; ++w) {
      const size_t begin = w * chunk;
      const size_t end = std::min(selected.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end);
    }
    for (std::thread& th : pool) th.join();
  }

  std::vector<std::pair<int32_t, EmbeddingMatrix>> updates;
  updates.reserve(selected.size());
  for (size_t i = 0; i < selected.size(); ++i) {
    MatrixMessage msg = decode_matrix_message(inbound[i]);
    updates.emplace_back(static_cast<int32_t>(msg.client), std::move(msg.matrix));
  }
  server.entities = aggregate(server.table, updates, server.entities);
  ++server.round;
  return selected;
}

EvalPoint evaluate_clients(const ServerState& server, std::span<const ClientState> clients,
                           eval::Directions directions, bool use_valid_split, int threads) {
  EvalPoint point;
  point.round = server.round;
  std::vector<eval::Metrics> metrics;
  std::vector<int64_t> weights;
  for (const ClientState& client : clients) {
    const kg::TripleStore& split =
        use_valid_split ? client.shard->valid : client.shard->test;
    if (split.empty()) continue;
    const EmbeddingMatrix local = distribute(server, client.id);
    const eval::KgeScorer scorer(client.settings.spec, local, client.relations);
    const eval::Metrics m =
        eval::evaluate(scorer, split.triples(), client.full_filter, directions, threads);
    point.per_client.push_back({client.id, m});
    metrics.push_back(m);
    weights.push_back(m.queries);
  }
  if (!metrics.empty()) point.average = eval::weighted_average(metrics, weights);
  return point;
}

FedSnapshot train_federated(FedTrainState& state, const RoundConfig& config,
                            eval::Directions directions, int threads,
                            const EvalCallback& on_eval) {
  for (int64_t r = state.next_round; r <= config.max_rounds; ++r) {
    run_round(state.server, state.clients, config, threads);
    state.next_round = r + 1;
    if (r % config.eval_every != 0) continue;

    EvalPoint point = evaluate_clients(state.server, state.clients, directions,
                                       /*use_valid_split=*/true, threads);
    state.history.push_back(point);
    if (on_eval) on_eval(point);

    if (point.average.mrr > state.best_mrr) {
      state.best_mrr = point.average.mrr;
      state.non_improving = 0;
      state.best.round = state.server.round;
      state.best.server_entities = state.server.entities;
      state.best.client_relations.clear();
      for (const ClientState& c : state.clients) state.best.client_relations.push_back(c.relations);
      state.best.eval = point;
    } else {
      ++state.non_improving;
      if (state.non_improving >= std::max(config.patience, 1)) break;
    }
  }
  return state.best;
}

}  // namespace fedkge::fed
