// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fedkge/cli/experiments.hpp"
#include "support/synthetic.hpp"

using namespace fedkge;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("fedkge_exp_test_" + std::to_string(++counter));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

cli::RunConfig small_config() {
  cli::RunConfig c;
  c.model = model::ModelKind::TransE;
  c.embedding_dim = 16;
  c.margin = 0.5;
  c.neg_per_pos = 8;
  c.learning_rate = 0.01;
  c.batch_size = 64;
  c.seed = 5;
  return c;
}

// Clients with pairwise-disjoint entity and relation sets: two independent
// graphs merged into one federated dataset.
kg::FederatedDataset disjoint_dataset(uint64_t seed) {
  kg::FederatedDataset out;
  for (int g = 0; g < 2; ++g) {
    testsupport::SyntheticConfig cfg;
    cfg.entities = 25;
    cfg.relations = 3;
    cfg.triples = 130;
    cfg.seed = seed + static_cast<uint64_t>(g) * 1000;
    testsupport::SyntheticKg synth = testsupport::make_synthetic_kg(cfg);

    // Re-label so nothing collides across the two graphs.
    kg::Vocabulary renamed;
    const std::string prefix = g == 0 ? "A_" : "B_";
    for (const std::string& e : synth.vocab.entities.labels()) renamed.entities.add(prefix + e);
    for (const std::string& r : synth.vocab.relations.labels())
      renamed.relations.add(prefix + r);

    kg::FederatedDataset single = kg::federate_split(synth.store, renamed, 1, {}, seed + static_cast<uint64_t>(g));
    kg::ClientShard shard = std::move(single.clients[0]);
    shard.id = g;
    out.clients.push_back(std::move(shard));
  }
  for (const kg::ClientShard& c : out.clients) {
    for (const std::string& e : c.vocab.entities.labels()) out.global.entities.add(e);
    for (const std::string& r : c.vocab.relations.labels()) out.global.relations.add(r);
  }
  return out;
}

}  // namespace

TEST_CASE("one-client fed with F=1 equals single training, bitwise") {
  testsupport::SyntheticConfig synth;
  synth.entities = 40;
  synth.relations = 4;
  synth.triples = 260;
  synth.seed = 3;
  const kg::FederatedDataset dataset = testsupport::make_synthetic_federated(synth, 1, 4);

  cli::RunConfig fed_config = small_config();
  fed_config.setting = cli::Setting::Fed;
  fed_config.client_fraction = 1.0;
  fed_config.local_epochs = 3;
  fed_config.max_rounds = 4;
  fed_config.eval_every_rounds = 2;
  fed_config.fed_patience = 1000;

  cli::RunConfig single_config = small_config();
  single_config.setting = cli::Setting::Single;
  single_config.max_epochs = 12;  // 4 rounds x 3 local epochs
  single_config.eval_every_epochs = 6;
  single_config.local_patience = 1000;

  const cli::RunResult fed = cli::run_fed(dataset, fed_config);
  const cli::RunResult single = cli::run_single(dataset, single_config);

  REQUIRE(fed.final_params.size() == 1);
  REQUIRE(single.final_params.size() == 1);
  CHECK(fed.final_params[0].entities == single.final_params[0].entities);
  CHECK(fed.final_params[0].relations == single.final_params[0].relations);

  // Same parameters at matching evaluation points give the same metrics.
  REQUIRE(fed.valid_history[0].size() == single.valid_history[0].size());
  for (size_t i = 0; i < fed.valid_history[0].size(); ++i) {
    CHECK(fed.valid_history[0][i].second.mrr == single.valid_history[0][i].second.mrr);
    CHECK(fed.valid_history[0][i].second.hits10 == single.valid_history[0][i].second.hits10);
  }
}

TEST_CASE("entire on disjoint shards decomposes into the single runs, bitwise") {
  const kg::FederatedDataset dataset = disjoint_dataset(11);

  cli::RunConfig config = small_config();
  config.max_epochs = 20;
  config.eval_every_epochs = 5;
  config.local_patience = 1000;

  cli::RunConfig entire_config = config;
  entire_config.setting = cli::Setting::Entire;
  cli::RunConfig single_config = config;
  single_config.setting = cli::Setting::Single;

  const cli::RunResult entire = cli::run_entire(dataset, entire_config);
  const cli::RunResult single = cli::run_single(dataset, single_config);

  for (size_t c = 0; c < 2; ++c) {
    CHECK(entire.final_params[c].entities == single.final_params[c].entities);
    CHECK(entire.final_params[c].relations == single.final_params[c].relations);
    REQUIRE(entire.valid_history[c].size() == single.valid_history[c].size());
    for (size_t i = 0; i < entire.valid_history[c].size(); ++i) {
      CHECK(entire.valid_history[c][i].first == single.valid_history[c][i].first);
      CHECK(entire.valid_history[c][i].second.mrr == single.valid_history[c][i].second.mrr);
      CHECK(entire.valid_history[c][i].second.hits1 == single.valid_history[c][i].second.hits1);
      CHECK(entire.valid_history[c][i].second.hits10 ==
            single.valid_history[c][i].second.hits10);
    }
  }
}

TEST_CASE("entire couples clients when entities overlap") {
  // Sanity check against the decomposition test: with shared entities the
  // pooled run must differ from isolated runs.
  testsupport::SyntheticConfig synth;
  synth.entities = 40;
  synth.relations = 6;
  synth.triples = 300;
  synth.seed = 21;
  const kg::FederatedDataset dataset = testsupport::make_synthetic_federated(synth, 2, 22);

  cli::RunConfig config = small_config();
  config.max_epochs = 10;
  config.eval_every_epochs = 5;
  config.local_patience = 1000;
  cli::RunConfig entire_config = config;
  entire_config.setting = cli::Setting::Entire;
  cli::RunConfig single_config = config;
  single_config.setting = cli::Setting::Single;

  const cli::RunResult entire = cli::run_entire(dataset, entire_config);
  const cli::RunResult single = cli::run_single(dataset, single_config);
  CHECK(entire.final_params[0].entities != single.final_params[0].entities);
}

TEST_CASE("fed training resumes from a checkpoint record exactly") {
  testsupport::SyntheticConfig synth;
  synth.entities = 50;
  synth.relations = 6;
  synth.triples = 320;
  synth.seed = 31;
  const kg::FederatedDataset dataset = testsupport::make_synthetic_federated(synth, 3, 32);

  cli::RunConfig config = small_config();
  config.setting = cli::Setting::Fed;
  config.client_fraction = 0.7;
  config.local_epochs = 2;
  config.eval_every_rounds = 2;
  config.fed_patience = 1000;

  // Uninterrupted: 8 rounds.
  cli::RunConfig full_config = config;
  full_config.max_rounds = 8;
  io::ResumeRecord full_final;
  const cli::RunResult full = cli::run_fed(dataset, full_config, nullptr, nullptr, &full_final);

  // Interrupted at round 4, then resumed to 8.
  cli::RunConfig half_config = config;
  half_config.max_rounds = 4;
  io::ResumeRecord midpoint;
  cli::run_fed(dataset, half_config, nullptr, nullptr, &midpoint);
  CHECK(midpoint.next_round == 5);

  cli::RunConfig rest_config = config;
  rest_config.max_rounds = 8;
  io::ResumeRecord resumed_final;
  const cli::RunResult resumed =
      cli::run_fed(dataset, rest_config, nullptr, &midpoint, &resumed_final);

  CHECK(resumed_final.server_entities == full_final.server_entities);
  CHECK(resumed_final.server_round == full_final.server_round);
  CHECK(resumed_final.server_rng == full_final.server_rng);
  for (size_t c = 0; c < 3; ++c) {
    CHECK(resumed_final.clients[c].entities == full_final.clients[c].entities);
    CHECK(resumed_final.clients[c].relations == full_final.clients[c].relations);
    CHECK(resumed_final.clients[c].rng_state == full_final.clients[c].rng_state);
    CHECK(resumed_final.clients[c].entity_opt.step_counts ==
          full_final.clients[c].entity_opt.step_counts);
  }
  // The resumed history is the suffix of the uninterrupted one.
  for (size_t c = 0; c < 3; ++c) {
    const auto& full_h = full.valid_history[c];
    const auto& res_h = resumed.valid_history[c];
    REQUIRE(res_h.size() <= full_h.size());
    const size_t offset = full_h.size() - res_h.size();
    for (size_t i = 0; i < res_h.size(); ++i) {
      CHECK(res_h[i].first == full_h[offset + i].first);
      CHECK(res_h[i].second.mrr == full_h[offset + i].second.mrr);
    }
  }
}

TEST_CASE("metrics logs are byte-identical across reruns and thread counts") {
  testsupport::SyntheticConfig synth;
  synth.entities = 40;
  synth.relations = 6;
  synth.triples = 260;
  synth.seed = 41;
  const kg::FederatedDataset dataset = testsupport::make_synthetic_federated(synth, 3, 42);

  cli::RunConfig config = small_config();
  config.setting = cli::Setting::Fed;
  config.local_epochs = 2;
  config.max_rounds = 6;
  config.eval_every_rounds = 2;
  config.fed_patience = 1000;

  const auto dir = temp_dir();
  const auto run = [&](const fs::path& path, int threads) {
    cli::RunConfig c = config;
    c.threads = threads;
    io::MetricsLog log(path);
    cli::run_fed(dataset, c, &log);
    log.flush();
  };
  run(dir / "t1a.tsv", 1);
  run(dir / "t1b.tsv", 1);
  run(dir / "t4.tsv", 4);
  const std::string a = slurp(dir / "t1a.tsv");
  CHECK(a == slurp(dir / "t1b.tsv"));
  CHECK(a == slurp(dir / "t4.tsv"));
  CHECK(a.find("\tavg\tvalid\t") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("run logs one record per evaluation point per client") {
  testsupport::SyntheticConfig synth;
  synth.entities = 30;
  synth.relations = 4;
  synth.triples = 200;
  synth.seed = 51;
  const kg::FederatedDataset dataset = testsupport::make_synthetic_federated(synth, 2, 52);

  cli::RunConfig config = small_config();
  config.setting = cli::Setting::Fed;
  config.local_epochs = 1;
  config.max_rounds = 6;
  config.eval_every_rounds = 3;
  config.fed_patience = 1000;

  const auto dir = temp_dir();
  io::MetricsLog log(dir / "m.tsv");
  cli::run_fed(dataset, config, &log);
  log.flush();
  const std::string text = slurp(dir / "m.tsv");
  // 2 evaluation points x (2 clients + avg) on valid, plus test records and
  // the two summary lines.
  size_t valid_lines = 0;
  size_t at = 0;
  while ((at = text.find("\tvalid\t", at)) != std::string::npos) {
    ++valid_lines;
    at += 1;
  }
  CHECK(valid_lines == 2 * 3 + 1);  // per-point records plus the -1 summary
  fs::remove_all(dir);
}
