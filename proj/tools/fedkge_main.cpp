// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
//
// fedkge command-line driver: split | train | eval | fuse | sweep.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedkge/cli/config.hpp"
#include "fedkge/cli/experiments.hpp"
#include "fedkge/io/checkpoint.hpp"
#include "fedkge/io/metrics_log.hpp"
#include "fedkge/kg/federate.hpp"
#include "fedkge/kg/loader.hpp"

namespace fs = std::filesystem;
using namespace fedkge;

namespace {

void print_metrics_row(const std::string& label, const eval::Metrics& m) {
  std::printf("%-10s  mrr %.4f  h@1 %.4f  h@5 %.4f  h@10 %.4f  (%lld queries)\n",
              label.c_str(), m.mrr, m.hits1, m.hits5, m.hits10,
              static_cast<long long>(m.queries));
}

// Shared flag block; every train-adjacent command accepts the same overrides.
struct ConfigCli {
  std::string config_file;
  std::optional<std::string> setting, model, manifest, out_dir, corruption, optimizer,
      directions, fusion_split;
  std::optional<uint64_t> seed;
  std::optional<int> threads, neg_per_pos, batch_size, local_epochs, max_rounds, max_epochs,
      eval_every_rounds, eval_every_epochs, patience, transe_norm, fusion_epochs;
  std::optional<int64_t> embedding_dim;
  std::optional<double> margin, adv_temperature, learning_rate, client_fraction, fusion_margin,
      fusion_learning_rate;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "JSON config file");
    cmd->add_option("--setting", setting, "single|entire|fed");
    cmd->add_option("--model", model, "TransE|DistMult|ComplEx|RotatE");
    cmd->add_option("--manifest", manifest, "split manifest path");
    cmd->add_option("--seed", seed, "run seed");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--threads", threads, "worker threads (results are thread-count invariant)");
    cmd->add_option("--dim", embedding_dim, "embedding dimension");
    cmd->add_option("--margin", margin, "loss margin");
    cmd->add_option("--adv-temperature", adv_temperature, "self-adversarial temperature");
    cmd->add_option("--neg", neg_per_pos, "negatives per positive");
    cmd->add_option("--lr", learning_rate, "learning rate");
    cmd->add_option("--batch", batch_size, "batch size");
    cmd->add_option("--transe-norm", transe_norm, "TransE norm order (1 or 2)");
    cmd->add_option("--corruption", corruption, "both|tail");
    cmd->add_option("--optimizer", optimizer, "adam|sgd");
    cmd->add_option("--fraction", client_fraction, "client fraction per round");
    cmd->add_option("--local-epochs", local_epochs, "local epochs per round");
    cmd->add_option("--max-rounds", max_rounds, "round cap (fed)");
    cmd->add_option("--max-epochs", max_epochs, "epoch cap (single/entire)");
    cmd->add_option("--eval-every-rounds", eval_every_rounds, "validation cadence (fed)");
    cmd->add_option("--eval-every-epochs", eval_every_epochs,
                    "validation cadence (single/entire)");
    cmd->add_option("--patience", patience, "early-stopping patience (evaluations)");
    cmd->add_option("--directions", directions, "ranking directions: both|tail|head");
    cmd->add_option("--fusion-margin", fusion_margin, "fusion ranking margin");
    cmd->add_option("--fusion-epochs", fusion_epochs, "fusion training epochs");
    cmd->add_option("--fusion-lr", fusion_learning_rate, "fusion learning rate");
    cmd->add_option("--fusion-split", fusion_split, "fusion fit split: valid|train");
  }

  cli::RunConfig resolve() const {
    cli::RunConfig c;
    if (!config_file.empty()) c = cli::load_config_file(config_file);
    if (setting) c.setting = cli::setting_from_string(*setting);
    if (model) c.model = model::model_kind_from_string(*model);
    if (manifest) c.manifest = *manifest;
    if (seed) c.seed = *seed;
    if (out_dir) c.out_dir = *out_dir;
    if (threads) c.threads = *threads;
    if (embedding_dim) c.embedding_dim = *embedding_dim;
    if (margin) c.margin = *margin;
    if (adv_temperature) c.adv_temperature = *adv_temperature;
    if (neg_per_pos) c.neg_per_pos = *neg_per_pos;
    if (learning_rate) c.learning_rate = *learning_rate;
    if (batch_size) c.batch_size = *batch_size;
    if (transe_norm) c.transe_norm = *transe_norm;
    if (corruption) c.corruption = *corruption;
    if (optimizer) c.optimizer = *optimizer;
    if (client_fraction) c.client_fraction = *client_fraction;
    if (local_epochs) c.local_epochs = *local_epochs;
    if (max_rounds) c.max_rounds = *max_rounds;
    if (max_epochs) c.max_epochs = *max_epochs;
    if (eval_every_rounds) c.eval_every_rounds = *eval_every_rounds;
    if (eval_every_epochs) c.eval_every_epochs = *eval_every_epochs;
    if (patience) {
      c.fed_patience = *patience;
      c.local_patience = *patience;
    }
    if (directions) c.directions = *directions;
    if (fusion_margin) c.fusion_margin = *fusion_margin;
    if (fusion_epochs) c.fusion_epochs = *fusion_epochs;
    if (fusion_learning_rate) c.fusion_learning_rate = *fusion_learning_rate;
    if (fusion_split) c.fusion_split = *fusion_split;
    // Re-validate the merged configuration before anything runs.
    return cli::parse_config(cli::config_to_json(c));
  }
};

void write_effective_config(const fs::path& out_dir, const cli::RunConfig& config) {
  fs::create_directories(out_dir);
  std::ofstream out(out_dir / "effective_config.json", std::ios::binary);
  out << cli::config_to_json(config);
}

kg::FederatedDataset load_dataset(const cli::RunConfig& config) {
  if (config.manifest.empty())
    throw std::runtime_error("no dataset: set manifest in the config or pass --manifest");
  return kg::load_split(config.manifest);
}

int cmd_split(const std::string& input, int clients, uint64_t seed, const std::string& out_dir,
              const std::vector<double>& ratios) {
  kg::Vocabulary vocab;
  const kg::TripleStore store = kg::load_triples(input, vocab);
  kg::SplitRatios r;
  if (!ratios.empty()) {
    if (ratios.size() != 3) throw std::runtime_error("--ratios needs exactly 3 values");
    r = {ratios[0], ratios[1], ratios[2]};
  }
  const kg::FederatedDataset dataset = kg::federate_split(store, vocab, clients, r, seed);
  kg::write_split(out_dir, dataset, seed);

  const kg::DatasetStats stats = kg::shard_stats(dataset);
  std::printf("%-8s %10s %10s %10s\n", "client", "relations", "entities", "triples");
  for (const kg::ShardStats& s : stats.per_client)
    std::printf("%-8d %10d %10d %10lld\n", s.client, s.relations, s.entities,
                static_cast<long long>(s.triples));
  std::printf("%-8s %10.1f %10.1f %10.1f\n", "avg", stats.avg_relations, stats.avg_entities,
              stats.avg_triples);
  std::printf("wrote %s\n", (fs::path(out_dir) / "manifest.txt").string().c_str());
  return 0;
}

int cmd_train(const ConfigCli& cc, const std::string& resume_path) {
  cli::RunConfig config = cc.resolve();
  std::optional<io::Checkpoint> previous;
  if (!resume_path.empty()) {
    previous = io::load_checkpoint(resume_path);
    if (!previous->resume) throw std::runtime_error("checkpoint has no resumable state");
    // The stored config governs the run; only out_dir/threads may differ.
    cli::RunConfig stored = cli::parse_config(previous->config_json);
    stored.out_dir = config.out_dir.empty() ? stored.out_dir : config.out_dir;
    stored.threads = config.threads;
    config = stored;
  }
  if (config.out_dir.empty()) throw std::runtime_error("train: --out (or out_dir) is required");

  const kg::FederatedDataset dataset = load_dataset(config);
  write_effective_config(config.out_dir, config);
  std::cout << cli::config_to_json(config);
  io::MetricsLog log(fs::path(config.out_dir) / "metrics.tsv");

  cli::RunResult result;
  io::Checkpoint ckpt;
  if (config.setting == cli::Setting::Fed) {
    io::ResumeRecord final_state;
    result = cli::run_fed(dataset, config, &log,
                          previous ? &*previous->resume : nullptr, &final_state);
    ckpt = cli::make_checkpoint(dataset, config, result);
    ckpt.resume = std::move(final_state);
  } else {
    result = cli::run_training(dataset, config, &log);
    ckpt = cli::make_checkpoint(dataset, config, result);
  }
  log.flush();
  const fs::path ckpt_path = fs::path(config.out_dir) / "checkpoint.fkge";
  io::save_checkpoint(ckpt_path, ckpt);

  for (size_t i = 0; i < dataset.clients.size(); ++i)
    print_metrics_row("client " + std::to_string(dataset.clients[i].id),
                      result.test_metrics[i]);
  print_metrics_row("test-avg", result.test_avg);
  std::printf("wrote %s\n", ckpt_path.string().c_str());
  return 0;
}

// Rebuilds per-client scorers from a checkpoint, verifying vocabularies.
struct LoadedModels {
  cli::RunConfig config;
  std::vector<cli::ClientModel> models;
  std::vector<cli::ClientModel> fed_models;  // only for fused checkpoints
  io::Checkpoint ckpt;
};

LoadedModels load_models(const std::string& path, const kg::FederatedDataset& dataset) {
  LoadedModels out;
  out.ckpt = io::load_checkpoint(path);
  out.config = cli::parse_config(out.ckpt.config_json);
  if (out.ckpt.models.size() != dataset.clients.size())
    throw std::runtime_error("checkpoint client count does not match dataset");
  for (size_t i = 0; i < dataset.clients.size(); ++i) {
    const io::ClientParams& p = out.ckpt.models[i];
    const kg::ClientShard& shard = dataset.clients[i];
    if (p.entity_labels != shard.vocab.entities.labels() ||
        p.relation_labels != shard.vocab.relations.labels())
      throw std::runtime_error("vocabulary mismatch between checkpoint and dataset (client " +
                               std::to_string(shard.id) + ")");
    out.models.push_back({p.entities, p.relations});
  }
  if (out.ckpt.fed_models) {
    for (size_t i = 0; i < dataset.clients.size(); ++i) {
      const io::ClientParams& p = (*out.ckpt.fed_models)[i];
      out.fed_models.push_back({p.entities, p.relations});
    }
  }
  return out;
}

int cmd_eval(const std::string& ckpt_path, const std::string& split,
             const std::string& manifest_override, const std::string& directions_override,
             int threads) {
  io::Checkpoint probe = io::load_checkpoint(ckpt_path);
  cli::RunConfig config = cli::parse_config(probe.config_json);
  if (!manifest_override.empty()) config.manifest = manifest_override;
  if (!directions_override.empty()) config.directions = directions_override;
  config.threads = threads;
  const kg::FederatedDataset dataset = load_dataset(config);
  const LoadedModels loaded = load_models(ckpt_path, dataset);
  const fed::TrainSettings settings = cli::train_settings(config);
  const eval::Directions dirs = cli::eval_directions(config);

  std::vector<eval::Metrics> all;
  std::vector<int64_t> weights;
  for (size_t i = 0; i < dataset.clients.size(); ++i) {
    const kg::ClientShard& shard = dataset.clients[i];
    const kg::TripleStore& triples = split == "valid" ? shard.valid : shard.test;
    if (triples.empty()) {
      std::printf("client %d: %s split empty, skipped\n", shard.id, split.c_str());
      continue;
    }
    kg::FilterIndex filter;
    filter.add_all(shard.train.triples());
    filter.add_all(shard.valid.triples());
    filter.add_all(shard.test.triples());
    filter.finalize();

    const eval::KgeScorer scorer_a(settings.spec, loaded.models[i].entities,
                                   loaded.models[i].relations);
    eval::Metrics m;
    if (loaded.ckpt.fusion) {
      const eval::KgeScorer scorer_b(settings.spec, loaded.fed_models[i].entities,
                                     loaded.fed_models[i].relations);
      fusion::FusionModel fmodel;
      fmodel.scorer_a = &scorer_a;
      fmodel.scorer_b = &scorer_b;
      fmodel.weight = loaded.ckpt.fusion->weights[i];
      fmodel.bias = loaded.ckpt.fusion->biases[i];
      const fusion::FusionScorer fused(fmodel);
      m = eval::evaluate(fused, triples.triples(), filter, dirs, threads);
    } else {
      m = eval::evaluate(scorer_a, triples.triples(), filter, dirs, threads);
    }
    print_metrics_row("client " + std::to_string(shard.id), m);
    all.push_back(m);
    weights.push_back(m.queries);
  }
  if (!all.empty()) print_metrics_row("avg", eval::weighted_average(all, weights));
  return 0;
}

int cmd_fuse(const std::string& single_path, const std::string& fed_path, const ConfigCli& cc) {
  io::Checkpoint fed_probe = io::load_checkpoint(fed_path);
  cli::RunConfig config = cli::parse_config(fed_probe.config_json);
  {
    // Apply command-line overrides on top of the fed run's stored config.
    cli::RunConfig overrides = cc.resolve();
    if (!overrides.out_dir.empty()) config.out_dir = overrides.out_dir;
    if (!overrides.manifest.empty()) config.manifest = overrides.manifest;
    config.threads = overrides.threads;
    config.fusion_margin = overrides.fusion_margin;
    config.fusion_epochs = overrides.fusion_epochs;
    config.fusion_learning_rate = overrides.fusion_learning_rate;
    config.fusion_split = overrides.fusion_split;
    config.seed = overrides.seed != 0 ? overrides.seed : config.seed;
  }
  if (config.out_dir.empty()) throw std::runtime_error("fuse: --out is required");

  const kg::FederatedDataset dataset = load_dataset(config);
  const LoadedModels single_loaded = load_models(single_path, dataset);
  const LoadedModels fed_loaded = load_models(fed_path, dataset);

  write_effective_config(config.out_dir, config);
  io::MetricsLog log(fs::path(config.out_dir) / "metrics.tsv");
  const cli::FuseResult result =
      cli::run_fusion(dataset, config, single_loaded.models, fed_loaded.models, &log);
  log.flush();

  io::Checkpoint fused;
  fused.config_json = cli::config_to_json(config);
  fused.models = single_loaded.ckpt.models;
  fused.fed_models = fed_loaded.ckpt.models;
  fused.best.point = -1;
  io::FusionRecord record;
  for (const cli::FusedClientMetrics& fm : result.per_client) {
    record.client_ids.push_back(fm.client);
    record.weights.push_back(fm.weight);
    record.biases.push_back(fm.bias);
    fused.best.client_ids.push_back(fm.client);
    fused.best.client_points.push_back(-1);
    fused.best.per_client.push_back(fm.fused_valid);
  }
  fused.best.average = result.fused_valid_avg;
  fused.fusion = std::move(record);
  const fs::path out_path = fs::path(config.out_dir) / "checkpoint.fkge";
  io::save_checkpoint(out_path, fused);

  for (const cli::FusedClientMetrics& fm : result.per_client) {
    std::printf("client %d  [w0 %.4f w1 %.4f]\n", fm.client, fm.weight[0], fm.weight[1]);
    print_metrics_row("  single", fm.single_test);
    print_metrics_row("  fed", fm.fed_test);
    print_metrics_row("  fused", fm.fused_test);
  }
  print_metrics_row("fused-avg", result.fused_test_avg);
  std::printf("wrote %s\n", out_path.string().c_str());
  return 0;
}

int cmd_sweep(const ConfigCli& cc, const std::vector<double>& fractions,
              const std::vector<int>& epochs, const std::vector<int>& batches) {
  const cli::RunConfig base = cc.resolve();
  if (base.out_dir.empty()) throw std::runtime_error("sweep: --out is required");
  const kg::FederatedDataset dataset = load_dataset(base);
  fs::create_directories(base.out_dir);

  const std::vector<double> fs_grid = fractions.empty()
                                          ? std::vector<double>{base.client_fraction}
                                          : fractions;
  const std::vector<int> e_grid = epochs.empty() ? std::vector<int>{base.local_epochs} : epochs;
  const std::vector<int> b_grid = batches.empty() ? std::vector<int>{base.batch_size} : batches;

  std::ofstream summary(fs::path(base.out_dir) / "summary.tsv", std::ios::binary);
  summary << "fraction\tlocal_epochs\tbatch_size\trounds\tbest_valid_mrr\ttest_mrr\ttest_h10\n";
  for (double f : fs_grid) {
    for (int e : e_grid) {
      for (int b : b_grid) {
        cli::RunConfig config = base;
        config.setting = cli::Setting::Fed;
        config.client_fraction = f;
        config.local_epochs = e;
        config.batch_size = b;
        char tag[64];
        std::snprintf(tag, sizeof(tag), "F%g_E%d_B%d", f, e, b);
        config.out_dir = (fs::path(base.out_dir) / tag).string();
        write_effective_config(config.out_dir, config);
        io::MetricsLog log(fs::path(config.out_dir) / "metrics.tsv");
        const cli::RunResult result = cli::run_fed(dataset, config, &log);
        log.flush();
        io::save_checkpoint(fs::path(config.out_dir) / "checkpoint.fkge",
                            cli::make_checkpoint(dataset, config, result));
        char row[256];
        std::snprintf(row, sizeof(row), "%.17g\t%d\t%d\t%lld\t%.17g\t%.17g\t%.17g\n", f, e, b,
                      static_cast<long long>(result.points_run), result.valid_avg.mrr,
                      result.test_avg.mrr, result.test_avg.hits10);
        summary << row;
        std::printf("%s: rounds %lld, valid mrr %.4f, test mrr %.4f\n", tag,
                    static_cast<long long>(result.points_run), result.valid_avg.mrr,
                    result.test_avg.mrr);
      }
    }
  }
  std::printf("wrote %s\n", (fs::path(base.out_dir) / "summary.tsv").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"federated knowledge-graph embedding toolkit"};
  app.require_subcommand(1);

  // split
  auto* split = app.add_subcommand("split", "partition a triple file into client shards");
  std::string split_input, split_out;
  int split_clients = 3;
  uint64_t split_seed = 0;
  std::vector<double> split_ratios;
  split->add_option("--input", split_input, "tab-separated triple file")->required();
  split->add_option("--clients", split_clients, "number of clients")->required();
  split->add_option("--seed", split_seed, "partition seed");
  split->add_option("--out", split_out, "output directory")->required();
  split->add_option("--ratios", split_ratios, "train,valid,test ratios (default 0.8 0.1 0.1)");

  // train
  auto* train = app.add_subcommand("train", "train under the single, entire or fed setting");
  ConfigCli train_cc;
  train_cc.attach(train);
  std::string resume_path;
  train->add_option("--resume", resume_path, "checkpoint to resume (fed setting)");

  // eval
  auto* evalc = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string eval_ckpt, eval_split = "test", eval_manifest, eval_directions;
  int eval_threads = 1;
  evalc->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
  evalc->add_option("--split", eval_split, "valid|test");
  evalc->add_option("--manifest", eval_manifest, "override dataset manifest");
  evalc->add_option("--directions", eval_directions, "both|tail|head");
  evalc->add_option("--threads", eval_threads, "worker threads");

  // fuse
  auto* fuse = app.add_subcommand("fuse", "fuse single- and fed-trained scorers per client");
  std::string fuse_single, fuse_fed;
  ConfigCli fuse_cc;
  fuse->add_option("--single", fuse_single, "single-setting checkpoint")->required();
  fuse->add_option("--fed", fuse_fed, "fed-setting checkpoint")->required();
  fuse_cc.attach(fuse);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "grid over client fraction / epochs / batch size");
  ConfigCli sweep_cc;
  sweep_cc.attach(sweep);
  std::vector<double> sweep_fractions;
  std::vector<int> sweep_epochs, sweep_batches;
  sweep->add_option("--fractions", sweep_fractions, "client fractions to sweep");
  sweep->add_option("--epochs-grid", sweep_epochs, "local epoch values to sweep");
  sweep->add_option("--batches-grid", sweep_batches, "batch sizes to sweep");

  CLI11_PARSE(app, argc, argv);

  try {
    if (split->parsed())
      return cmd_split(split_input, split_clients, split_seed, split_out, split_ratios);
    if (train->parsed()) return cmd_train(train_cc, resume_path);
    if (evalc->parsed())
      return cmd_eval(eval_ckpt, eval_split, eval_manifest, eval_directions, eval_threads);
    if (fuse->parsed()) return cmd_fuse(fuse_single, fuse_fed, fuse_cc);
    if (sweep->parsed()) return cmd_sweep(sweep_cc, sweep_fractions, sweep_epochs, sweep_batches);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
