// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedkge/eval/evaluate.hpp"
#include "fedkge/matrix.hpp"

namespace fedkge::io {

// Sectioned binary checkpoint. Layout (all integers/doubles little-endian):
//
//   magic "FKGECKP1" | u32 version | u32 section_count |
//   section*: (u32 name_len | name | u64 payload_len | payload)
//
// Sections appear in a fixed order and every payload is encoded
// deterministically, so save -> load -> save is byte-identical. Details in
// docs/file_formats.md.

struct ClientParams {
  int32_t client = 0;
  std::vector<std::string> entity_labels;
  std::vector<std::string> relation_labels;
  EmbeddingMatrix entities;
  EmbeddingMatrix relations;
};

struct BestRecord {
  int64_t point = 0;  // epoch or round of the snapshot (-1: per-client points differ)
  std::vector<int32_t> client_ids;
  std::vector<int64_t> client_points;
  std::vector<eval::Metrics> per_client;
  eval::Metrics average;
};

struct OptimizerDump {
  EmbeddingMatrix first_moment;
  EmbeddingMatrix second_moment;
  std::vector<int64_t> step_counts;
};

struct ClientResume {
  EmbeddingMatrix entities;
  EmbeddingMatrix relations;
  OptimizerDump entity_opt;
  OptimizerDump relation_opt;
  std::string rng_state;
};

// Full federated-training state; loading it and continuing reproduces an
// uninterrupted run exactly.
struct ResumeRecord {
  EmbeddingMatrix server_entities;
  int64_t server_round = 0;
  std::string server_rng;
  std::vector<ClientResume> clients;
  int64_t next_round = 1;
  int32_t non_improving = 0;
  double best_mrr = -1.0;
  // Best snapshot so far (empty matrices when no evaluation has happened).
  int64_t best_round = 0;
  EmbeddingMatrix best_server_entities;
  std::vector<EmbeddingMatrix> best_client_relations;
  BestRecord best_eval;
};

struct FusionRecord {
  std::vector<int32_t> client_ids;
  std::vector<std::array<double, 2>> weights;
  std::vector<double> biases;
};

struct Checkpoint {
  std::string config_json;           // canonical effective config
  std::vector<ClientParams> models;  // eval-ready best parameters per client
  std::optional<std::vector<ClientParams>> fed_models;  // second scorer of a fused checkpoint
  BestRecord best;
  std::optional<ResumeRecord> resume;
  std::optional<FusionRecord> fusion;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace fedkge::io
