// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fedkge/cli/config.hpp"
#include "fedkge/fed/round.hpp"
#include "fedkge/io/checkpoint.hpp"
#include "fedkge/io/metrics_log.hpp"
#include "fedkge/kg/federate.hpp"

namespace fedkge::cli {

struct ClientModel {
  EmbeddingMatrix entities;   // client-shaped (n_c x d)
  EmbeddingMatrix relations;  // m_c x d_r
};

struct RunResult {
  // Eval-ready parameters at each client's best validation point.
  std::vector<ClientModel> best;
  std::vector<int64_t> best_point;          // epoch/round of the snapshot, per client
  std::vector<eval::Metrics> best_valid;    // per client at its best point
  // State at loop end (fed: each client's last local view).
  std::vector<ClientModel> final_params;
  // Test metrics from the best parameters.
  std::vector<eval::Metrics> test_metrics;
  eval::Metrics valid_avg;
  eval::Metrics test_avg;
  // Per client: (epoch-or-round, valid metrics) for every evaluation.
  std::vector<std::vector<std::pair<int64_t, eval::Metrics>>> valid_history;
  int64_t points_run = 0;  // epochs or rounds actually executed
};

// The three training settings. All share initialization streams: the entity
// matrix is drawn once over the global entity table and gathered per client,
// so runs differ only by how training couples the clients.
//
// single: each client trains alone on its shard, early-stopped on its own
//         validation MRR.
// entire: one pooled model (shared entity rows, all relation rows), trained
//         with client-blocked batches; early-stopped on the weighted average
//         validation MRR.
// fed:    the round protocol (distribute / local train / aggregate).
RunResult run_single(const kg::FederatedDataset& dataset, const RunConfig& config,
                     io::MetricsLog* log = nullptr);
RunResult run_entire(const kg::FederatedDataset& dataset, const RunConfig& config,
                     io::MetricsLog* log = nullptr);
// `resume_from` continues a checkpointed run exactly; `final_state_out`, when
// given, receives the full end-of-run training state for later resumption.
RunResult run_fed(const kg::FederatedDataset& dataset, const RunConfig& config,
                  io::MetricsLog* log = nullptr, const io::ResumeRecord* resume_from = nullptr,
                  io::ResumeRecord* final_state_out = nullptr);

RunResult run_training(const kg::FederatedDataset& dataset, const RunConfig& config,
                       io::MetricsLog* log = nullptr);

// Eval-ready checkpoint of a finished run (config echo, per-client best
// parameters with their vocabularies, best-metric record).
io::Checkpoint make_checkpoint(const kg::FederatedDataset& dataset, const RunConfig& config,
                               const RunResult& result);

struct FusedClientMetrics {
  int32_t client = 0;
  std::array<double, 2> weight{};
  double bias = 0.0;
  eval::Metrics single_valid, fed_valid, fused_valid;
  eval::Metrics single_test, fed_test, fused_test;
};

struct FuseResult {
  std::vector<FusedClientMetrics> per_client;
  eval::Metrics fused_valid_avg;
  eval::Metrics fused_test_avg;
};

// Per-client model fusion over two trained runs of the same dataset: fits the
// linear combiner on the configured split while both scorers stay frozen,
// then reports component and fused metrics.
FuseResult run_fusion(const kg::FederatedDataset& dataset, const RunConfig& config,
                      const std::vector<ClientModel>& single_models,
                      const std::vector<ClientModel>& fed_models,
                      io::MetricsLog* log = nullptr);

}  // namespace fedkge::cli
