// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "fedkge/kg/triple_store.hpp"

namespace fedkge::kg {

// One client's private knowledge graph. Triples are re-encoded against the
// shard-local vocabulary (entities and relations actually used, in
// first-occurrence order over train, then valid, then test).
struct ClientShard {
  int32_t id = 0;
  Vocabulary vocab;
  TripleStore train;
  TripleStore valid;
  TripleStore test;

  size_t triple_count() const { return train.size() + valid.size() + test.size(); }
  bool operator==(const ClientShard&) const = default;
};

struct FederatedDataset {
  std::vector<ClientShard> clients;
  // Union of client entity/relation label sets, first seen in client order
  // then local order. Client relation sets are pairwise disjoint.
  Vocabulary global;

  bool operator==(const FederatedDataset&) const = default;
};

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
};

// Partitions relations uniformly at random into `client_count` groups (sizes
// differing by at most 1), hands each client every triple of its relations,
// shuffles per client and splits train/valid/test. Valid and test sizes are
// floored, the remainder goes to train. Deterministic given the seed.
//
// Throws std::invalid_argument if client_count < 1, the store is empty, or
// client_count exceeds the relation count.
FederatedDataset federate_split(const TripleStore& store, const Vocabulary& vocab,
                                int client_count, SplitRatios ratios, uint64_t seed);

struct ShardStats {
  int32_t client = 0;
  int32_t relations = 0;
  int32_t entities = 0;
  int64_t triples = 0;
};

struct DatasetStats {
  std::vector<ShardStats> per_client;
  double avg_relations = 0.0;
  double avg_entities = 0.0;
  double avg_triples = 0.0;
};

DatasetStats shard_stats(const FederatedDataset& dataset);

// Split manifest: a line-oriented text file naming, per client, the relation
// labels it owns and its three triple files. Together with the shard files it
// reproduces the FederatedDataset bit-exactly (format documented in
// docs/file_formats.md).
void write_split(const std::filesystem::path& out_dir, const FederatedDataset& dataset,
                 uint64_t seed);
FederatedDataset load_split(const std::filesystem::path& manifest_path);

}  // namespace fedkge::kg
