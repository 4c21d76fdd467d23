// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "fedkge/eval/evaluate.hpp"
#include "fedkge/fed/client.hpp"
#include "fedkge/fed/round.hpp"
#include "fedkge/fusion/fusion.hpp"
#include "fedkge/model/model.hpp"

namespace fedkge::cli {

enum class Setting { Single, Entire, Fed };

Setting setting_from_string(const std::string& name);
std::string to_string(Setting s);

// Full run description. Defaults are the reference hyperparameters:
// dim 256 for entities and relations, margin 10 (training and fusion),
// temperature 1, 256 negatives, lr 0.001, 3 local epochs, batch 512,
// validation every 10 epochs (single/entire) or 5 rounds (fed),
// early-stopping patience 15.
struct RunConfig {
  Setting setting = Setting::Fed;
  std::string manifest;
  uint64_t seed = 0;
  std::string out_dir;
  int threads = 1;

  // train
  model::ModelKind model = model::ModelKind::TransE;
  int transe_norm = 2;
  int64_t embedding_dim = 256;
  double margin = 10.0;
  double adv_temperature = 1.0;
  int neg_per_pos = 256;
  double learning_rate = 0.001;
  int batch_size = 512;
  std::string corruption = "both";  // "both" | "tail"
  bool strict_negatives = false;
  std::string optimizer = "adam";  // "adam" | "sgd"
  bool reset_optimizer_each_round = false;

  // fed
  double client_fraction = 1.0;
  int local_epochs = 3;
  int max_rounds = 1000;
  int eval_every_rounds = 5;
  int fed_patience = 15;

  // single / entire
  int max_epochs = 1000;
  int eval_every_epochs = 10;
  int local_patience = 15;

  // fusion
  double fusion_margin = 10.0;
  int fusion_neg_per_pos = 1;
  int fusion_epochs = 100;
  double fusion_learning_rate = 0.01;
  int fusion_batch_size = 512;
  std::string fusion_split = "valid";  // "valid" | "train"

  // eval
  std::string directions = "both";  // "both" | "tail" | "head"
};

// Parses and schema-validates the JSON form: unknown keys, wrong types and
// out-of-range values all raise with the offending path. `text` is the full
// file contents.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::filesystem::path& path);

// Canonical JSON echo of the effective configuration (sorted keys, 2-space
// indent); written next to every run's outputs for provenance.
std::string config_to_json(const RunConfig& config);

// Derived views.
fed::TrainSettings train_settings(const RunConfig& config);
fed::RoundConfig round_config(const RunConfig& config);
fusion::FusionConfig fusion_config(const RunConfig& config);
eval::Directions eval_directions(const RunConfig& config);

}  // namespace fedkge::cli
