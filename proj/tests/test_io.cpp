// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fedkge/cli/config.hpp"
#include "fedkge/io/checkpoint.hpp"
#include "fedkge/io/metrics_log.hpp"

using namespace fedkge;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / ("fedkge_io_test_" + std::to_string(++counter));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

io::Checkpoint sample_checkpoint() {
  io::Checkpoint ckpt;
  ckpt.config_json = cli::config_to_json(cli::RunConfig{});
  Rng rng(3);
  for (int32_t c = 0; c < 2; ++c) {
    io::ClientParams params;
    params.client = c;
    params.entity_labels = {"a" + std::to_string(c), "b" + std::to_string(c)};
    params.relation_labels = {"r" + std::to_string(c)};
    params.entities = EmbeddingMatrix::uniform(2, 4, -1.0, 1.0, rng);
    params.relations = EmbeddingMatrix::uniform(1, 4, -1.0, 1.0, rng);
    ckpt.models.push_back(std::move(params));
    ckpt.best.client_ids.push_back(c);
    ckpt.best.client_points.push_back(15);
    ckpt.best.per_client.push_back({0.5 + 0.1 * c, 0.3, 0.6, 0.7, 40});
  }
  ckpt.best.point = 15;
  ckpt.best.average = {0.55, 0.3, 0.6, 0.7, 80};

  io::ResumeRecord resume;
  resume.server_entities = EmbeddingMatrix::uniform(3, 4, -1.0, 1.0, rng);
  resume.server_round = 15;
  resume.server_rng = Rng(7).save_state();
  for (int c = 0; c < 2; ++c) {
    io::ClientResume cr;
    cr.entities = EmbeddingMatrix::uniform(2, 4, -1.0, 1.0, rng);
    cr.relations = EmbeddingMatrix::uniform(1, 4, -1.0, 1.0, rng);
    cr.entity_opt = {EmbeddingMatrix(2, 4), EmbeddingMatrix(2, 4), {3, 4}};
    cr.relation_opt = {EmbeddingMatrix(1, 4), EmbeddingMatrix(1, 4), {5}};
    cr.rng_state = Rng(static_cast<uint64_t>(c + 10)).save_state();
    resume.clients.push_back(std::move(cr));
  }
  resume.next_round = 16;
  resume.non_improving = 2;
  resume.best_mrr = 0.55;
  resume.best_round = 10;
  resume.best_server_entities = EmbeddingMatrix::uniform(3, 4, -1.0, 1.0, rng);
  resume.best_client_relations = {EmbeddingMatrix::uniform(1, 4, -1.0, 1.0, rng),
                                  EmbeddingMatrix::uniform(1, 4, -1.0, 1.0, rng)};
  resume.best_eval = ckpt.best;
  ckpt.resume = std::move(resume);

  io::FusionRecord fusion;
  fusion.client_ids = {0, 1};
  fusion.weights = {{0.4, 0.6}, {0.2, 0.8}};
  fusion.biases = {0.0, -1.0};
  ckpt.fusion = std::move(fusion);
  return ckpt;
}

}  // namespace

TEST_CASE("metrics log: documented line format, byte-for-byte") {
  const auto dir = temp_dir();
  {
    io::MetricsLog log(dir / "m.tsv");
    log.append(5, "0", "valid", {0.5, 0.25, 0.75, 1.0, 128});
    log.append(-1, "avg", "test", {1.0 / 3.0, 0.0, 0.5, 0.625, 96});
    log.flush();
  }
  const std::string text = slurp(dir / "m.tsv");
  CHECK(text ==
        "# fedkge metrics v1\n"
        "# point\tclient\tsplit\tmrr\thits1\thits5\thits10\tqueries\n"
        "5\t0\tvalid\t0.5\t0.25\t0.75\t1\t128\n"
        "-1\tavg\ttest\t0.33333333333333331\t0\t0.5\t0.625\t96\n");
  fs::remove_all(dir);
}

TEST_CASE("checkpoint: save -> load preserves every field") {
  const auto dir = temp_dir();
  const io::Checkpoint original = sample_checkpoint();
  io::save_checkpoint(dir / "c.fkge", original);
  const io::Checkpoint loaded = io::load_checkpoint(dir / "c.fkge");

  CHECK(loaded.config_json == original.config_json);
  REQUIRE(loaded.models.size() == 2);
  CHECK(loaded.models[1].entity_labels == original.models[1].entity_labels);
  CHECK(loaded.models[1].entities == original.models[1].entities);
  CHECK(loaded.best.point == 15);
  CHECK(loaded.best.per_client[1].mrr == doctest::Approx(0.6));
  REQUIRE(loaded.resume.has_value());
  CHECK(loaded.resume->server_entities == original.resume->server_entities);
  CHECK(loaded.resume->clients[0].entity_opt.step_counts == std::vector<int64_t>{3, 4});
  CHECK(loaded.resume->clients[1].rng_state == original.resume->clients[1].rng_state);
  CHECK(loaded.resume->best_eval.average.queries == 80);
  REQUIRE(loaded.fusion.has_value());
  CHECK(loaded.fusion->weights[1][1] == doctest::Approx(0.8));
  fs::remove_all(dir);
}

TEST_CASE("checkpoint: save -> load -> save is byte-identical") {
  const auto dir = temp_dir();
  io::save_checkpoint(dir / "a.fkge", sample_checkpoint());
  const io::Checkpoint loaded = io::load_checkpoint(dir / "a.fkge");
  io::save_checkpoint(dir / "b.fkge", loaded);
  CHECK(slurp(dir / "a.fkge") == slurp(dir / "b.fkge"));
  fs::remove_all(dir);
}

TEST_CASE("checkpoint: rejects foreign files") {
  const auto dir = temp_dir();
  std::ofstream(dir / "junk.fkge", std::ios::binary) << "definitely not a checkpoint";
  CHECK_THROWS_AS(io::load_checkpoint(dir / "junk.fkge"), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("config: defaults match the reference hyperparameters") {
  const cli::RunConfig c;
  CHECK(c.embedding_dim == 256);
  CHECK(c.margin == 10.0);
  CHECK(c.fusion_margin == 10.0);
  CHECK(c.adv_temperature == 1.0);
  CHECK(c.neg_per_pos == 256);
  CHECK(c.learning_rate == 0.001);
  CHECK(c.local_epochs == 3);
  CHECK(c.batch_size == 512);
  CHECK(c.eval_every_rounds == 5);
  CHECK(c.eval_every_epochs == 10);
  CHECK(c.fed_patience == 15);
  CHECK(c.local_patience == 15);
  CHECK(c.optimizer == "adam");
  CHECK(c.client_fraction == 1.0);
}

TEST_CASE("config: JSON round-trip preserves every field") {
  cli::RunConfig c;
  c.setting = cli::Setting::Entire;
  c.model = model::ModelKind::RotatE;
  c.embedding_dim = 64;
  c.margin = 4.5;
  c.client_fraction = 0.5;
  c.strict_negatives = true;
  c.corruption = "tail";
  c.fusion_split = "train";
  c.seed = 987654321;
  const cli::RunConfig back = cli::parse_config(cli::config_to_json(c));
  CHECK(cli::config_to_json(back) == cli::config_to_json(c));
  CHECK(back.model == model::ModelKind::RotatE);
  CHECK(back.client_fraction == 0.5);
  CHECK(back.strict_negatives);
}

TEST_CASE("config: schema violations are rejected with their path") {
  CHECK_THROWS_AS(cli::parse_config("not json"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_config(R"({"unknown_key": 1})"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_config(R"({"train": {"margin": "ten"}})"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_config(R"({"fed": {"client_fraction": 0.0}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_config(R"({"fed": {"client_fraction": 1.5}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_config(R"({"train": {"embedding_dim": 0}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_config(R"({"model": "RotatE", "train": {"embedding_dim": 33}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_config(R"({"eval": {"directions": "sideways"}})"),
                  std::invalid_argument);

  try {
    cli::parse_config(R"({"train": {"neg_per_pos": -3}})");
    FAIL("expected validation error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("neg_per_pos") != std::string::npos);
  }
}
