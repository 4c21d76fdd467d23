// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/kg/federate.hpp"

#include <fstream>

#include "fedkge/kg/loader.hpp"
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "fedkge/rng.hpp"

namespace fedkge::kg {
namespace {

// Re-encodes global-id triples into the shard-local vocabulary, extending it
// in first-occurrence order.
TripleStore localize(std::span<const Triple> triples, const Vocabulary& global,
                     Vocabulary& local) {
  std::vector<Triple> out;
  out.reserve(triples.size());
  for (const Triple& t : triples) {
    out.push_back({local.entities.add(global.entities.label(t.head)),
                   local.relations.add(global.relations.label(t.relation)),
                   local.entities.add(global.entities.label(t.tail))});
  }
  return TripleStore(std::move(out));
}

Vocabulary build_global(const std::vector<ClientShard>& clients) {
  Vocabulary global;
  for (const ClientShard& c : clients) {
    for (const std::string& e : c.vocab.entities.labels()) global.entities.add(e);
    for (const std::string& r : c.vocab.relations.labels()) global.relations.add(r);
  }
  return global;
}

}  // namespace

FederatedDataset federate_split(const TripleStore& store, const Vocabulary& vocab,
                                int client_count, SplitRatios ratios, uint64_t seed) {
  if (client_count < 1) throw std::invalid_argument("federate_split: client_count must be >= 1");
  if (store.empty()) throw std::invalid_argument("federate_split: empty store");
  const int32_t relation_count = vocab.relations.size();
  if (client_count > relation_count)
    throw std::invalid_argument("federate_split: more clients (" + std::to_string(client_count) +
                                ") than relations (" + std::to_string(relation_count) + ")");

  // Shuffle relation ids, deal round-robin: group sizes differ by at most 1.
  std::vector<int32_t> rel_order(static_cast<size_t>(relation_count));
  std::iota(rel_order.begin(), rel_order.end(), 0);
  Rng part_rng(derive_seed(seed, "relation-partition"));
  part_rng.shuffle(std::span<int32_t>(rel_order));
  std::vector<int32_t> rel_owner(static_cast<size_t>(relation_count));
  for (size_t i = 0; i < rel_order.size(); ++i)
    rel_owner[static_cast<size_t>(rel_order[i])] = static_cast<int32_t>(i % client_count);

  std::vector<std::vector<Triple>> per_client(static_cast<size_t>(client_count));
  for (const Triple& t : store.triples())
    per_client[static_cast<size_t>(rel_owner[static_cast<size_t>(t.relation)])].push_back(t);

  FederatedDataset dataset;
  dataset.clients.reserve(static_cast<size_t>(client_count));
  for (int c = 0; c < client_count; ++c) {
    auto& triples = per_client[static_cast<size_t>(c)];
    Rng shard_rng(derive_seed(seed, "shard-shuffle", static_cast<uint64_t>(c)));
    shard_rng.shuffle(std::span<Triple>(triples));

    const size_t n = triples.size();
    const size_t n_valid = static_cast<size_t>(ratios.valid * static_cast<double>(n));
    const size_t n_test = static_cast<size_t>(ratios.test * static_cast<double>(n));
    const size_t n_train = n - n_valid - n_test;

    ClientShard shard;
    shard.id = c;
    std::span<const Triple> all(triples);
    shard.train = localize(all.subspan(0, n_train), vocab, shard.vocab);
    shard.valid = localize(all.subspan(n_train, n_valid), vocab, shard.vocab);
    shard.test = localize(all.subspan(n_train + n_valid, n_test), vocab, shard.vocab);
    dataset.clients.push_back(std::move(shard));
  }

  dataset.global = build_global(dataset.clients);
  return dataset;
}

DatasetStats shard_stats(const FederatedDataset& dataset) {
  DatasetStats stats;
  for (const ClientShard& c : dataset.clients) {
    stats.per_client.push_back({c.id, c.vocab.relations.size(), c.vocab.entities.size(),
                                static_cast<int64_t>(c.triple_count())});
  }
  const double n = static_cast<double>(stats.per_client.size());
  for (const ShardStats& s : stats.per_client) {
    stats.avg_relations += static_cast<double>(s.relations) / n;
    stats.avg_entities += static_cast<double>(s.entities) / n;
    stats.avg_triples += static_cast<double>(s.triples) / n;
  }
  return stats;
}

void write_split(const std::filesystem::path& out_dir, const FederatedDataset& dataset,
                 uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::ofstream manifest(out_dir / "manifest.txt", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot write manifest in " + out_dir.string());
  manifest << "fedkge-split v1\n";
  manifest << "clients\t" << dataset.clients.size() << '\n';
  manifest << "seed\t" << seed << '\n';

  for (const ClientShard& c : dataset.clients) {
    const std::string dir_name = "client_" + std::to_string(c.id);
    fs::create_directories(out_dir / dir_name);
    const auto save = [&](const char* name, const TripleStore& store) {
      const fs::path rel = fs::path(dir_name) / (std::string(name) + ".txt");
      save_triples(out_dir / rel, store, c.vocab);
      return rel.generic_string();
    };
    manifest << "client\t" << c.id << '\n';
    manifest << "relations";
    for (const std::string& r : c.vocab.relations.labels()) manifest << '\t' << r;
    manifest << '\n';
    manifest << "train\t" << save("train", c.train) << '\n';
    manifest << "valid\t" << save("valid", c.valid) << '\n';
    manifest << "test\t" << save("test", c.test) << '\n';
  }
  if (!manifest) throw std::runtime_error("manifest write failed in " + out_dir.string());
}

FederatedDataset load_split(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path.string());
  const std::filesystem::path base = manifest_path.parent_path();

  std::string line;
  if (!std::getline(in, line) || line != "fedkge-split v1")
    throw std::runtime_error("bad manifest header: " + manifest_path.string());

  FederatedDataset dataset;
  ClientShard* current = nullptr;
  std::unordered_set<std::string> seen_relations;

  auto fields = [](const std::string& s) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
      const size_t tab = s.find('\t', start);
      out.push_back(s.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    return out;
  };

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = fields(line);
    const std::string& key = f[0];
    if (key == "clients" || key == "seed") continue;
    if (key == "client") {
      dataset.clients.emplace_back();
      current = &dataset.clients.back();
      current->id = static_cast<int32_t>(std::stol(f.at(1)));
      continue;
    }
    if (current == nullptr) throw std::runtime_error("manifest record before first client");
    if (key == "relations") {
      for (size_t i = 1; i < f.size(); ++i) {
        if (!seen_relations.insert(f[i]).second)
          throw std::runtime_error("manifest: relation '" + f[i] + "' owned by two clients");
      }
    } else if (key == "train" || key == "valid" || key == "test") {
      TripleStore store = load_triples(base / f.at(1), current->vocab, /*frozen=*/false);
      if (key == "train")
        current->train = std::move(store);
      else if (key == "valid")
        current->valid = std::move(store);
      else
        current->test = std::move(store);
    } else {
      throw std::runtime_error("manifest: unknown record '" + key + "'");
    }
  }

  Vocabulary global;
  for (const ClientShard& c : dataset.clients) {
    for (const std::string& e : c.vocab.entities.labels()) global.entities.add(e);
    for (const std::string& r : c.vocab.relations.labels()) global.relations.add(r);
  }
  dataset.global = std::move(global);
  return dataset;
}

}  // namespace fedkge::kg
