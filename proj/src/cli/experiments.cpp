// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/cli/experiments.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fedkge::cli {
namespace {

fed::EntityTable make_table(const kg::FederatedDataset& dataset) {
  std::vector<std::vector<std::string>> labels;
  labels.reserve(dataset.clients.size());
  for (const kg::ClientShard& c : dataset.clients) labels.push_back(c.vocab.entities.labels());
  return fed::EntityTable::build(labels);
}

kg::FilterIndex full_filter(const kg::ClientShard& shard) {
  kg::FilterIndex f;
  f.add_all(shard.train.triples());
  f.add_all(shard.valid.triples());
  f.add_all(shard.test.triples());
  f.finalize();
  return f;
}

void log_client(io::MetricsLog* log, int64_t point, int32_t client, const char* split,
                const eval::Metrics& m) {
  if (log) log->append(point, std::to_string(client), split, m);
}

void log_avg(io::MetricsLog* log, int64_t point, const char* split, const eval::Metrics& m) {
  if (log) log->append(point, "avg", split, m);
}

eval::Metrics average_or_empty(const std::vector<eval::Metrics>& metrics,
                               const std::vector<int64_t>& weights) {
  if (metrics.empty()) return {};
  return eval::weighted_average(metrics, weights);
}

// Shared early-stopping bookkeeping for the epoch-driven settings.
struct StopTracker {
  double best = -1.0;
  int bad = 0;
  bool improved(double mrr) {
    if (mrr > best) {
      best = mrr;
      bad = 0;
      return true;
    }
    ++bad;
    return false;
  }
  bool exhausted(int patience) const { return bad >= std::max(patience, 1); }
};

}  // namespace

RunResult run_single(const kg::FederatedDataset& dataset, const RunConfig& config,
                     io::MetricsLog* log) {
  const fed::TrainSettings settings = train_settings(config);
  const eval::Directions dirs = eval_directions(config);
  const fed::EntityTable table = make_table(dataset);
  Rng init_rng(derive_seed(config.seed, "entity-init"));
  const EmbeddingMatrix global_init =
      model::init_entity_matrix(table.global_count(), config.embedding_dim, init_rng);

  RunResult result;
  std::vector<eval::Metrics> valid_all, test_all;
  std::vector<int64_t> valid_w, test_w;

  for (size_t i = 0; i < dataset.clients.size(); ++i) {
    const kg::ClientShard& shard = dataset.clients[i];
    EmbeddingMatrix entities = gather_rows(global_init, table.local_to_global(shard.id));
    Rng rel_rng(derive_seed(config.seed, "relations", static_cast<uint64_t>(shard.id)));
    EmbeddingMatrix relations = model::init_relation_matrix(
        settings.spec, shard.vocab.relations.size(), config.embedding_dim, rel_rng);
    optim::OptimizerState ent_opt(entities.rows(), entities.cols());
    optim::OptimizerState rel_opt(relations.rows(), relations.cols());
    Rng train_rng(derive_seed(config.seed, "train", static_cast<uint64_t>(shard.id)));
    const kg::FilterIndex filter = full_filter(shard);

    fed::LocalTrainer trainer(shard, settings, entities, relations, ent_opt, rel_opt, train_rng,
                              nullptr, nullptr,
                              settings.sampler.strict ? &filter : nullptr);

    StopTracker stop;
    ClientModel best{entities, relations};
    int64_t best_epoch = 0;
    eval::Metrics best_metrics{};
    std::vector<std::pair<int64_t, eval::Metrics>> history;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
      trainer.run_epochs(1);
      result.points_run = std::max<int64_t>(result.points_run, epoch);
      if (epoch % config.eval_every_epochs != 0 || shard.valid.empty()) continue;
      const eval::KgeScorer scorer(settings.spec, entities, relations);
      const eval::Metrics m =
          eval::evaluate(scorer, shard.valid.triples(), filter, dirs, config.threads);
      history.emplace_back(epoch, m);
      log_client(log, epoch, shard.id, "valid", m);
      if (stop.improved(m.mrr)) {
        best = {entities, relations};
        best_epoch = epoch;
        best_metrics = m;
      } else if (stop.exhausted(config.local_patience)) {
        break;
      }
    }
    if (best_epoch == 0) best = {entities, relations};  // never evaluated

    eval::Metrics test{};
    if (!shard.test.empty()) {
      const eval::KgeScorer best_scorer(settings.spec, best.entities, best.relations);
      test = eval::evaluate(best_scorer, shard.test.triples(), filter, dirs, config.threads);
      log_client(log, best_epoch, shard.id, "test", test);
      test_all.push_back(test);
      test_w.push_back(test.queries);
    }
    if (best_epoch > 0) {
      valid_all.push_back(best_metrics);
      valid_w.push_back(best_metrics.queries);
    }

    result.final_params.push_back({std::move(entities), std::move(relations)});
    result.best.push_back(std::move(best));
    result.best_point.push_back(best_epoch);
    result.best_valid.push_back(best_metrics);
    result.test_metrics.push_back(test);
    result.valid_history.push_back(std::move(history));
  }

  result.valid_avg = average_or_empty(valid_all, valid_w);
  result.test_avg = average_or_empty(test_all, test_w);
  log_avg(log, -1, "valid", result.valid_avg);
  log_avg(log, -1, "test", result.test_avg);
  return result;
}

RunResult run_entire(const kg::FederatedDataset& dataset, const RunConfig& config,
                     io::MetricsLog* log) {
  const fed::TrainSettings settings = train_settings(config);
  const eval::Directions dirs = eval_directions(config);
  const fed::EntityTable table = make_table(dataset);
  Rng init_rng(derive_seed(config.seed, "entity-init"));
  EmbeddingMatrix entities =
      model::init_entity_matrix(table.global_count(), config.embedding_dim, init_rng);

  // Pooled relation matrix: each client's relations occupy a contiguous row
  // block, initialized from that client's own stream so pooling changes
  // nothing about where any row starts.
  const int64_t rel_dim = model::relation_dim(settings.spec.kind, config.embedding_dim);
  int64_t total_relations = 0;
  for (const kg::ClientShard& c : dataset.clients) total_relations += c.vocab.relations.size();
  EmbeddingMatrix relations(total_relations, rel_dim);
  std::vector<std::vector<int32_t>> relation_maps;
  int64_t offset = 0;
  for (const kg::ClientShard& c : dataset.clients) {
    Rng rel_rng(derive_seed(config.seed, "relations", static_cast<uint64_t>(c.id)));
    const EmbeddingMatrix block = model::init_relation_matrix(
        settings.spec, c.vocab.relations.size(), config.embedding_dim, rel_rng);
    std::vector<int32_t> map(static_cast<size_t>(block.rows()));
    for (int64_t r = 0; r < block.rows(); ++r) {
      auto dst = relations.row(offset + r);
      auto src = block.row(r);
      std::copy(src.begin(), src.end(), dst.begin());
      map[static_cast<size_t>(r)] = static_cast<int32_t>(offset + r);
    }
    relation_maps.push_back(std::move(map));
    offset += block.rows();
  }

  optim::OptimizerState ent_opt(entities.rows(), entities.cols());
  optim::OptimizerState rel_opt(relations.rows(), relations.cols());

  std::vector<Rng> rngs;
  std::vector<kg::FilterIndex> filters;
  rngs.reserve(dataset.clients.size());
  filters.reserve(dataset.clients.size());
  for (const kg::ClientShard& c : dataset.clients) {
    rngs.emplace_back(derive_seed(config.seed, "train", static_cast<uint64_t>(c.id)));
    filters.push_back(full_filter(c));
  }
  std::vector<fed::LocalTrainer> trainers;
  trainers.reserve(dataset.clients.size());
  for (size_t i = 0; i < dataset.clients.size(); ++i) {
    trainers.emplace_back(dataset.clients[i], settings, entities, relations, ent_opt, rel_opt,
                          rngs[i], &table.local_to_global(dataset.clients[i].id),
                          &relation_maps[i],
                          settings.sampler.strict ? &filters[i] : nullptr);
  }

  const auto client_view = [&](size_t i, const EmbeddingMatrix& ent_src,
                               const EmbeddingMatrix& rel_src) {
    return ClientModel{gather_rows(ent_src, table.local_to_global(dataset.clients[i].id)),
                       gather_rows(rel_src, relation_maps[i])};
  };

  RunResult result;
  result.valid_history.resize(dataset.clients.size());
  StopTracker stop;
  EmbeddingMatrix best_entities = entities;
  EmbeddingMatrix best_relations = relations;
  int64_t best_epoch = 0;
  std::vector<eval::Metrics> best_per_client(dataset.clients.size());
  eval::Metrics best_avg{};

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (auto& trainer : trainers) trainer.run_epochs(1);
    result.points_run = epoch;
    if (epoch % config.eval_every_epochs != 0) continue;

    std::vector<eval::Metrics> per_client(dataset.clients.size());
    std::vector<eval::Metrics> with_valid;
    std::vector<int64_t> weights;
    for (size_t i = 0; i < dataset.clients.size(); ++i) {
      const kg::ClientShard& shard = dataset.clients[i];
      if (shard.valid.empty()) continue;
      const ClientModel view = client_view(i, entities, relations);
      const eval::KgeScorer scorer(settings.spec, view.entities, view.relations);
      per_client[i] =
          eval::evaluate(scorer, shard.valid.triples(), filters[i], dirs, config.threads);
      result.valid_history[i].emplace_back(epoch, per_client[i]);
      log_client(log, epoch, shard.id, "valid", per_client[i]);
      with_valid.push_back(per_client[i]);
      weights.push_back(per_client[i].queries);
    }
    if (with_valid.empty()) continue;
    const eval::Metrics avg = eval::weighted_average(with_valid, weights);
    log_avg(log, epoch, "valid", avg);
    if (stop.improved(avg.mrr)) {
      best_entities = entities;
      best_relations = relations;
      best_epoch = epoch;
      best_per_client = per_client;
      best_avg = avg;
    } else if (stop.exhausted(config.local_patience)) {
      break;
    }
  }

  std::vector<eval::Metrics> test_all;
  std::vector<int64_t> test_w;
  for (size_t i = 0; i < dataset.clients.size(); ++i) {
    const kg::ClientShard& shard = dataset.clients[i];
    ClientModel best = client_view(i, best_entities, best_relations);
    eval::Metrics test{};
    if (!shard.test.empty()) {
      const eval::KgeScorer scorer(settings.spec, best.entities, best.relations);
      test = eval::evaluate(scorer, shard.test.triples(), filters[i], dirs, config.threads);
      log_client(log, best_epoch, shard.id, "test", test);
      test_all.push_back(test);
      test_w.push_back(test.queries);
    }
    result.best.push_back(std::move(best));
    result.best_point.push_back(best_epoch);
    result.best_valid.push_back(best_per_client[i]);
    result.test_metrics.push_back(test);
    result.final_params.push_back(client_view(i, entities, relations));
  }
  result.valid_avg = best_avg;
  result.test_avg = average_or_empty(test_all, test_w);
  log_avg(log, -1, "valid", result.valid_avg);
  log_avg(log, -1, "test", result.test_avg);
  return result;
}

namespace {

io::OptimizerDump dump_optimizer(const optim::OptimizerState& opt) {
  return {opt.first_moment(), opt.second_moment(), opt.step_counts()};
}

void restore_optimizer(optim::OptimizerState& opt, const io::OptimizerDump& dump) {
  opt.mutable_first_moment() = dump.first_moment;
  opt.mutable_second_moment() = dump.second_moment;
  opt.mutable_step_counts() = dump.step_counts;
}

io::ResumeRecord dump_fed_state(const fed::FedTrainState& state) {
  io::ResumeRecord rec;
  rec.server_entities = state.server.entities;
  rec.server_round = state.server.round;
  rec.server_rng = state.server.selection_rng.save_state();
  for (const fed::ClientState& c : state.clients) {
    io::ClientResume cr;
    cr.entities = c.entities;
    cr.relations = c.relations;
    cr.entity_opt = dump_optimizer(c.entity_opt);
    cr.relation_opt = dump_optimizer(c.relation_opt);
    cr.rng_state = c.rng.save_state();
    rec.clients.push_back(std::move(cr));
  }
  rec.next_round = state.next_round;
  rec.non_improving = state.non_improving;
  rec.best_mrr = state.best_mrr;
  rec.best_round = state.best.round;
  rec.best_server_entities = state.best.server_entities;
  rec.best_client_relations = state.best.client_relations;
  rec.best_eval.point = state.best.eval.round;
  for (const fed::ClientEval& ce : state.best.eval.per_client) {
    rec.best_eval.client_ids.push_back(ce.client);
    rec.best_eval.per_client.push_back(ce.metrics);
  }
  rec.best_eval.average = state.best.eval.average;
  return rec;
}

void restore_fed_state(fed::FedTrainState& state, const io::ResumeRecord& rec) {
  if (rec.clients.size() != state.clients.size())
    throw std::invalid_argument("resume: client count does not match dataset");
  state.server.entities = rec.server_entities;
  state.server.round = rec.server_round;
  state.server.selection_rng.load_state(rec.server_rng);
  for (size_t i = 0; i < state.clients.size(); ++i) {
    fed::ClientState& c = state.clients[i];
    const io::ClientResume& cr = rec.clients[i];
    c.entities = cr.entities;
    c.relations = cr.relations;
    restore_optimizer(c.entity_opt, cr.entity_opt);
    restore_optimizer(c.relation_opt, cr.relation_opt);
    c.rng.load_state(cr.rng_state);
  }
  state.next_round = rec.next_round;
  state.non_improving = rec.non_improving;
  state.best_mrr = rec.best_mrr;
  state.best.round = rec.best_round;
  state.best.server_entities = rec.best_server_entities;
  state.best.client_relations = rec.best_client_relations;
  state.best.eval.round = rec.best_eval.point;
  state.best.eval.per_client.clear();
  for (size_t i = 0; i < rec.best_eval.client_ids.size(); ++i)
    state.best.eval.per_client.push_back(
        {rec.best_eval.client_ids[i], rec.best_eval.per_client[i]});
  state.best.eval.average = rec.best_eval.average;
}

}  // namespace

RunResult run_fed(const kg::FederatedDataset& dataset, const RunConfig& config,
                  io::MetricsLog* log, const io::ResumeRecord* resume_from,
                  io::ResumeRecord* final_state_out) {
  const fed::TrainSettings settings = train_settings(config);
  const eval::Directions dirs = eval_directions(config);

  fed::FedTrainState state;
  state.clients = fed::make_clients(dataset, settings, config.seed);
  std::vector<std::vector<uint8_t>> registrations;
  registrations.reserve(state.clients.size());
  for (const fed::ClientState& c : state.clients)
    registrations.push_back(fed::make_register_payload(c));
  state.server = fed::make_server(registrations, config.embedding_dim, config.seed);
  if (resume_from != nullptr) restore_fed_state(state, *resume_from);

  RunResult result;
  result.valid_history.resize(state.clients.size());
  const fed::EvalCallback on_eval = [&](const fed::EvalPoint& point) {
    for (const fed::ClientEval& ce : point.per_client) {
      log_client(log, point.round, ce.client, "valid", ce.metrics);
      result.valid_history[static_cast<size_t>(ce.client)].emplace_back(point.round, ce.metrics);
    }
    log_avg(log, point.round, "valid", point.average);
  };

  const fed::FedSnapshot best =
      fed::train_federated(state, round_config(config), dirs, config.threads, on_eval);
  result.points_run = state.server.round;
  if (final_state_out != nullptr) *final_state_out = dump_fed_state(state);

  std::vector<eval::Metrics> test_all;
  std::vector<int64_t> test_w;
  std::vector<eval::Metrics> best_by_client(state.clients.size());
  for (const fed::ClientEval& ce : best.eval.per_client)
    best_by_client[static_cast<size_t>(ce.client)] = ce.metrics;

  const bool have_best = best.server_entities.rows() > 0;
  for (size_t i = 0; i < state.clients.size(); ++i) {
    const fed::ClientState& client = state.clients[i];
    const kg::ClientShard& shard = *client.shard;
    ClientModel model;
    if (have_best) {
      model.entities = gather_rows(best.server_entities,
                                   state.server.table.local_to_global(client.id));
      model.relations = best.client_relations[i];
    } else {
      model.entities = fed::distribute(state.server, client.id);
      model.relations = client.relations;
    }
    eval::Metrics test{};
    if (!shard.test.empty()) {
      const eval::KgeScorer scorer(settings.spec, model.entities, model.relations);
      test = eval::evaluate(scorer, shard.test.triples(), client.full_filter, dirs,
                            config.threads);
      log_client(log, best.round, shard.id, "test", test);
      test_all.push_back(test);
      test_w.push_back(test.queries);
    }
    result.best.push_back(std::move(model));
    result.best_point.push_back(best.round);
    result.best_valid.push_back(best_by_client[i]);
    result.test_metrics.push_back(test);
    result.final_params.push_back({client.entities, client.relations});
  }
  result.valid_avg = best.eval.average;
  result.test_avg = average_or_empty(test_all, test_w);
  log_avg(log, -1, "valid", result.valid_avg);
  log_avg(log, -1, "test", result.test_avg);
  return result;
}

RunResult run_training(const kg::FederatedDataset& dataset, const RunConfig& config,
                       io::MetricsLog* log) {
  switch (config.setting) {
    case Setting::Single: return run_single(dataset, config, log);
    case Setting::Entire: return run_entire(dataset, config, log);
    case Setting::Fed: return run_fed(dataset, config, log);
  }
  throw std::logic_error("run_training: bad setting");
}

io::Checkpoint make_checkpoint(const kg::FederatedDataset& dataset, const RunConfig& config,
                               const RunResult& result) {
  io::Checkpoint ckpt;
  ckpt.config_json = config_to_json(config);
  for (size_t i = 0; i < dataset.clients.size(); ++i) {
    const kg::ClientShard& shard = dataset.clients[i];
    io::ClientParams params;
    params.client = shard.id;
    params.entity_labels = shard.vocab.entities.labels();
    params.relation_labels = shard.vocab.relations.labels();
    params.entities = result.best[i].entities;
    params.relations = result.best[i].relations;
    ckpt.models.push_back(std::move(params));
    ckpt.best.client_ids.push_back(shard.id);
    ckpt.best.client_points.push_back(result.best_point[i]);
    ckpt.best.per_client.push_back(result.best_valid[i]);
  }
  const bool uniform = std::all_of(result.best_point.begin(), result.best_point.end(),
                                   [&](int64_t p) { return p == result.best_point.front(); });
  ckpt.best.point = uniform && !result.best_point.empty() ? result.best_point.front() : -1;
  ckpt.best.average = result.valid_avg;
  return ckpt;
}

FuseResult run_fusion(const kg::FederatedDataset& dataset, const RunConfig& config,
                      const std::vector<ClientModel>& single_models,
                      const std::vector<ClientModel>& fed_models, io::MetricsLog* log) {
  if (single_models.size() != dataset.clients.size() ||
      fed_models.size() != dataset.clients.size())
    throw std::invalid_argument("run_fusion: model count does not match dataset");
  const fed::TrainSettings settings = train_settings(config);
  const eval::Directions dirs = eval_directions(config);
  const fusion::FusionConfig fcfg = fusion_config(config);

  FuseResult out;
  std::vector<eval::Metrics> fused_valid_all, fused_test_all;
  std::vector<int64_t> valid_w, test_w;

  for (size_t i = 0; i < dataset.clients.size(); ++i) {
    const kg::ClientShard& shard = dataset.clients[i];
    const ClientModel& a = single_models[i];
    const ClientModel& b = fed_models[i];
    if (a.entities.rows() != shard.vocab.entities.size() ||
        b.entities.rows() != shard.vocab.entities.size())
      throw std::invalid_argument("run_fusion: vocabulary mismatch for client " +
                                  std::to_string(shard.id));

    const kg::FilterIndex filter = full_filter(shard);
    const eval::KgeScorer scorer_a(settings.spec, a.entities, a.relations);
    const eval::KgeScorer scorer_b(settings.spec, b.entities, b.relations);

    fusion::FusionModel fmodel;
    fmodel.scorer_a = &scorer_a;
    fmodel.scorer_b = &scorer_b;
    const kg::TripleStore& fit_split =
        config.fusion_split == "train" ? shard.train : shard.valid;
    Rng frng(derive_seed(config.seed, "fusion", static_cast<uint64_t>(shard.id)));
    fusion::train_fusion(fmodel, fit_split.triples(), fcfg, frng);

    const fusion::FusionScorer fused(fmodel);
    FusedClientMetrics fm;
    fm.client = shard.id;
    fm.weight = fmodel.weight;
    fm.bias = fmodel.bias;
    if (!shard.valid.empty()) {
      fm.single_valid = eval::evaluate(scorer_a, shard.valid.triples(), filter, dirs,
                                       config.threads);
      fm.fed_valid = eval::evaluate(scorer_b, shard.valid.triples(), filter, dirs,
                                    config.threads);
      fm.fused_valid = eval::evaluate(fused, shard.valid.triples(), filter, dirs,
                                      config.threads);
      log_client(log, -1, shard.id, "fused-valid", fm.fused_valid);
      fused_valid_all.push_back(fm.fused_valid);
      valid_w.push_back(fm.fused_valid.queries);
    }
    if (!shard.test.empty()) {
      fm.single_test = eval::evaluate(scorer_a, shard.test.triples(), filter, dirs,
                                      config.threads);
      fm.fed_test = eval::evaluate(scorer_b, shard.test.triples(), filter, dirs,
                                   config.threads);
      fm.fused_test = eval::evaluate(fused, shard.test.triples(), filter, dirs, config.threads);
      log_client(log, -1, shard.id, "fused-test", fm.fused_test);
      fused_test_all.push_back(fm.fused_test);
      test_w.push_back(fm.fused_test.queries);
    }
    out.per_client.push_back(fm);
  }

  out.fused_valid_avg = average_or_empty(fused_valid_all, valid_w);
  out.fused_test_avg = average_or_empty(fused_test_all, test_w);
  log_avg(log, -1, "fused-valid", out.fused_valid_avg);
  log_avg(log, -1, "fused-test", out.fused_test_avg);
  return out;
}

}  // namespace fedkge::cli
