// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fedkge/fed/entity_table.hpp"
#include "fedkge/fed/messages.hpp"
#include "fedkge/matrix.hpp"
#include "fedkge/rng.hpp"

namespace fedkge::fed {

// Privacy boundary: everything the server holds or accepts is entity labels,
// entity matrices and client ids. Relations and triples have no path into
// this state.
struct ServerState {
  EntityTable table;
  EmbeddingMatrix entities;  // global entity matrix, one row per table entry
  int64_t round = 0;
  Rng selection_rng;
};

// Builds the server from encoded REGISTER messages (one per client, in client
// id order) and initializes the global entity matrix from the seed-derived
// "entity-init" stream.
ServerState make_server(std::span<const std::vector<uint8_t>> register_payloads,
                        int64_t embedding_dim, uint64_t seed);

// Client-local view of the global matrix: local row j = global row idx^c(j).
// An index gather; the permutation-matrix product is never materialized.
EmbeddingMatrix distribute(const ServerState& server, int32_t client);

// Existence-weighted aggregation over the selected clients' uploads, given in
// ascending client id order: each owned global row becomes the mean of its
// owners' rows; rows owned by no selected client keep their previous value.
EmbeddingMatrix aggregate(const EntityTable& table,
                          std::span<const std::pair<int32_t, EmbeddingMatrix>> updates,
                          const EmbeddingMatrix& previous);

// Serializes the full server state (table labels, entity matrix, round, rng)
// for checkpointing and for the structural privacy check.
std::vector<uint8_t> serialize_server_state(const ServerState& server);

}  // namespace fedkge::fed
