// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fedkge/eval/evaluate.hpp"
#include "fedkge/fed/client.hpp"
#include "fedkge/fed/server.hpp"

namespace fedkge::fed {

struct RoundConfig {
  double client_fraction = 1.0;  // F in (0, 1]
  int local_epochs = 3;          // E
  int batch_size = 512;          // B (carried in TrainSettings; duplicated for visibility)
  int max_rounds = 1000;
  int eval_every = 5;    // rounds between validation evaluations
  int patience = 15;     // consecutive non-improving evaluations before stopping
};

// One protocol round: samples ceil(F * C) distinct clients with the server
// rng, ships each its entity slice as a DISTRIBUTE message, runs
// client_update, ships UPDATE messages back, aggregates in ascending client
// id order and advances the round counter. Unselected clients are untouched.
// Returns the selected ids (ascending). `threads` never changes results.
std::vector<int32_t> run_round(ServerState& server, std::span<ClientState> clients,
                               const RoundConfig& config, int threads = 1);

struct ClientEval {
  int32_t client = 0;
  eval::Metrics metrics;
};

struct EvalPoint {
  int64_t round = 0;
  std::vector<ClientEval> per_client;
  eval::Metrics average;  // weighted by per-client query counts
};

// Best-so-far model snapshot: the global entity matrix plus each client's
// private relation matrix (which is all evaluation needs).
struct FedSnapshot {
  int64_t round = 0;
  EmbeddingMatrix server_entities;
  std::vector<EmbeddingMatrix> client_relations;
  EvalPoint eval;
};

// Mutable driver state, separated out so a checkpoint can capture and resume
// an interrupted run exactly.
struct FedTrainState {
  ServerState server;
  std::vector<ClientState> clients;
  int64_t next_round = 1;
  int non_improving = 0;
  double best_mrr = -1.0;
  FedSnapshot best;
  std::vector<EvalPoint> history;
};

using EvalCallback = std::function<void(const EvalPoint&)>;

// Evaluates each client's split against the current global entity rows
// (gathered per client) and its own relations. Clients with an empty split
// are skipped in the average.
EvalPoint evaluate_clients(const ServerState& server, std::span<const ClientState> clients,
                           eval::Directions directions, bool use_valid_split, int threads);

// Algorithm-1 driver: loops run_round, evaluating validation MRR every
// eval_every rounds, keeping the best snapshot and stopping after `patience`
// consecutive evaluations without a new best (or at max_rounds).
FedSnapshot train_federated(FedTrainState& state, const RoundConfig& config,
                            eval::Directions directions = eval::Directions::Both,
                            int threads = 1, const EvalCallback& on_eval = {});

}  // namespace fedkge::fed
