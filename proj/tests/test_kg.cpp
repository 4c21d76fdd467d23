// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "fedkge/kg/federate.hpp"
#include "fedkge/kg/loader.hpp"
#include "fedkge/kg/triple_store.hpp"
#include "fedkge/rng.hpp"

using namespace fedkge;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("fedkge_kg_test_" + std::to_string(++counter));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& content) {
  const fs::path p = dir / name;
  std::ofstream out(p, std::ios::binary);
  out << content;
  return p;
}

// Random store for property checks: every relation gets at least one triple.
std::pair<kg::TripleStore, kg::Vocabulary> random_store(int entities, int relations,
                                                        int triples, uint64_t seed) {
  Rng rng(seed);
  kg::Vocabulary vocab;
  for (int e = 0; e < entities; ++e) vocab.entities.add("e" + std::to_string(e));
  for (int r = 0; r < relations; ++r) vocab.relations.add("r" + std::to_string(r));
  std::vector<kg::Triple> list;
  kg::FilterIndex seen;
  const auto add = [&](int32_t h, int32_t r, int32_t t) {
    const kg::Triple triple{h, r, t};
    if (seen.contains(triple)) return;
    seen.add(triple);
    list.push_back(triple);
  };
  for (int r = 0; r < relations; ++r)
    add(static_cast<int32_t>(rng.below(static_cast<uint64_t>(entities))), r,
        static_cast<int32_t>(rng.below(static_cast<uint64_t>(entities))));
  while (static_cast<int>(list.size()) < triples)
    add(static_cast<int32_t>(rng.below(static_cast<uint64_t>(entities))),
        static_cast<int32_t>(rng.below(static_cast<uint64_t>(relations))),
        static_cast<int32_t>(rng.below(static_cast<uint64_t>(entities))));
  return {kg::TripleStore(std::move(list)), std::move(vocab)};
}

}  // namespace

TEST_CASE("load_triples: two lines, two entities, one relation") {
  const auto dir = temp_dir();
  const auto path = write_file(dir, "toy.tsv", "a\tr1\tb\nb\tr1\ta\n");
  kg::Vocabulary vocab;
  const kg::TripleStore store = kg::load_triples(path, vocab);
  CHECK(store.size() == 2);
  CHECK(vocab.entities.size() == 2);
  CHECK(vocab.relations.size() == 1);
  CHECK(store.triples()[0] == kg::Triple{0, 0, 1});
  CHECK(store.triples()[1] == kg::Triple{1, 0, 0});
  fs::remove_all(dir);
}

TEST_CASE("load_triples: empty file gives empty store and vocabulary") {
  const auto dir = temp_dir();
  const auto path = write_file(dir, "empty.tsv", "");
  kg::Vocabulary vocab;
  const kg::TripleStore store = kg::load_triples(path, vocab);
  CHECK(store.empty());
  CHECK(vocab.entities.size() == 0);
  CHECK(vocab.relations.size() == 0);
  fs::remove_all(dir);
}

TEST_CASE("load_triples: malformed line reports its number") {
  const auto dir = temp_dir();
  const auto path = write_file(dir, "bad.tsv", "a\tr\tb\noops_no_tabs\n");
  kg::Vocabulary vocab;
  try {
    kg::load_triples(path, vocab);
    FAIL("expected parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("load_triples: frozen vocabulary rejects unknown labels") {
  const auto dir = temp_dir();
  const auto known = write_file(dir, "known.tsv", "a\tr\tb\n");
  const auto unknown = write_file(dir, "unknown.tsv", "a\tr\tc\n");
  kg::Vocabulary vocab;
  kg::load_triples(known, vocab);
  CHECK_THROWS_AS(kg::load_triples(unknown, vocab, /*frozen=*/true), std::runtime_error);
  // The same file extends an unfrozen vocabulary instead.
  const kg::TripleStore store = kg::load_triples(unknown, vocab, /*frozen=*/false);
  CHECK(store.size() == 1);
  CHECK(vocab.entities.size() == 3);
  fs::remove_all(dir);
}

TEST_CASE("load_triples: duplicates are dropped") {
  const auto dir = temp_dir();
  const auto path = write_file(dir, "dup.tsv", "a\tr\tb\na\tr\tb\na\tr\tc\n");
  kg::Vocabulary vocab;
  const kg::TripleStore store = kg::load_triples(path, vocab);
  CHECK(store.size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("published benchmark counts (needs FEDKGE_FB15K237_DIR)") {
  const char* dir = std::getenv("FEDKGE_FB15K237_DIR");
  if (dir == nullptr) {
    MESSAGE("FEDKGE_FB15K237_DIR not set; skipping benchmark-file checks");
    return;
  }
  kg::Vocabulary vocab;
  const kg::TripleStore train = kg::load_triples(fs::path(dir) / "train.txt", vocab);
  CHECK(train.size() == 272115);
  CHECK(vocab.entities.size() <= 14541);

  // Table-2 shape: 3 clients averaging ~79 relations / ~103373 triples.
  const kg::FederatedDataset dataset = kg::federate_split(train, vocab, 3, {}, 7);
  const kg::DatasetStats stats = kg::shard_stats(dataset);
  CHECK(stats.avg_triples == doctest::Approx(272115.0 / 3).epsilon(0.001));
  CHECK(stats.avg_relations == doctest::Approx(vocab.relations.size() / 3.0).epsilon(0.01));
}

TEST_CASE("filter index contains exactly the stored triples") {
  const auto [store, vocab] = random_store(20, 4, 60, 5);
  for (const kg::Triple& t : store.triples()) CHECK(store.filter().contains(t));
  Rng rng(9);
  int misses = 0;
  for (int i = 0; i < 200; ++i) {
    const kg::Triple probe{static_cast<int32_t>(rng.below(20)),
                           static_cast<int32_t>(rng.below(4)),
                           static_cast<int32_t>(rng.below(20))};
    bool in_list = false;
    for (const kg::Triple& t : store.triples()) in_list |= (t == probe);
    CHECK(store.filter().contains(probe) == in_list);
    misses += in_list ? 0 : 1;
  }
  CHECK(misses > 0);
}

TEST_CASE("federate_split: C=1 degenerates to one client with 0.8/0.1/0.1") {
  const auto [store, vocab] = random_store(30, 5, 200, 3);
  const kg::FederatedDataset dataset = kg::federate_split(store, vocab, 1, {}, 17);
  REQUIRE(dataset.clients.size() == 1);
  const kg::ClientShard& shard = dataset.clients[0];
  CHECK(shard.triple_count() == store.size());
  CHECK(shard.valid.size() == store.size() / 10);
  CHECK(shard.test.size() == store.size() / 10);
  CHECK(shard.train.size() == store.size() - 2 * (store.size() / 10));
}

TEST_CASE("federate_split: two relations over two clients, one relation each") {
  std::vector<kg::Triple> triples{{0, 0, 1}, {0, 1, 2}};
  kg::Vocabulary vocab;
  vocab.entities.add("a");
  vocab.entities.add("b");
  vocab.entities.add("c");
  vocab.relations.add("r1");
  vocab.relations.add("r2");
  const kg::TripleStore store(std::move(triples));

  // Either relation assignment is legal; both clients end with exactly one
  // relation's triples, and the same seed reproduces the same choice.
  const kg::FederatedDataset a = kg::federate_split(store, vocab, 2, {}, 99);
  const kg::FederatedDataset b = kg::federate_split(store, vocab, 2, {}, 99);
  CHECK(a == b);
  for (const kg::ClientShard& shard : a.clients) {
    CHECK(shard.vocab.relations.size() == 1);
    CHECK(shard.triple_count() == 1);
  }
  std::set<std::string> owned;
  for (const kg::ClientShard& shard : a.clients)
    owned.insert(shard.vocab.relations.labels().front());
  CHECK(owned == std::set<std::string>{"r1", "r2"});
}

TEST_CASE("federate_split: rejects C > relation count and empty stores") {
  const auto [store, vocab] = random_store(10, 3, 30, 1);
  CHECK_THROWS_AS(kg::federate_split(store, vocab, 4, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(kg::federate_split(store, vocab, 0, {}, 1), std::invalid_argument);
  kg::TripleStore empty;
  CHECK_THROWS_AS(kg::federate_split(empty, vocab, 1, {}, 1), std::invalid_argument);
}

TEST_CASE("federate_split properties: partition, conservation, leakage, determinism") {
  for (uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    const auto [store, vocab] = random_store(40, 11, 400, seed + 100);
    for (int clients : {1, 2, 3, 7}) {
      const kg::FederatedDataset dataset = kg::federate_split(store, vocab, clients, {}, seed);

      // Pairwise-disjoint relation sets whose union is the full set.
      std::set<std::string> all_relations;
      size_t relation_total = 0;
      size_t triple_total = 0;
      for (const kg::ClientShard& shard : dataset.clients) {
        relation_total += shard.vocab.relations.labels().size();
        triple_total += shard.triple_count();
        for (const std::string& r : shard.vocab.relations.labels()) all_relations.insert(r);

        // Group sizes differ by at most one.
        CHECK(shard.vocab.relations.size() >= 11 / clients);
        CHECK(shard.vocab.relations.size() <= 11 / clients + 1);

        // Split sizing: floor for valid/test, remainder to train.
        const size_t n = shard.triple_count();
        CHECK(shard.valid.size() == n / 10);
        CHECK(shard.test.size() == n / 10);

        // No leakage between the three splits.
        for (const kg::Triple& t : shard.valid.triples()) {
          CHECK_FALSE(shard.train.filter().contains(t));
          CHECK_FALSE(shard.test.filter().contains(t));
        }
        for (const kg::Triple& t : shard.test.triples())
          CHECK_FALSE(shard.train.filter().contains(t));

        // Every client entity appears in the global vocabulary.
        for (const std::string& e : shard.vocab.entities.labels())
          CHECK(dataset.global.entities.find(e).has_value());
      }
      CHECK(all_relations.size() == relation_total);
      CHECK(all_relations.size() == static_cast<size_t>(vocab.relations.size()));
      CHECK(triple_total == store.size());

      // Byte-for-byte determinism.
      CHECK(dataset == kg::federate_split(store, vocab, clients, {}, seed));
    }
  }
}

TEST_CASE("shard_stats: hand-counted toy split") {
  std::vector<kg::Triple> triples;
  kg::Vocabulary vocab;
  for (int e = 0; e < 6; ++e) vocab.entities.add("e" + std::to_string(e));
  vocab.relations.add("p");
  vocab.relations.add("q");
  for (int i = 0; i < 10; ++i)
    triples.push_back({static_cast<int32_t>(i % 6), i < 5 ? 0 : 1,
                       static_cast<int32_t>((i + 1) % 6)});
  const kg::TripleStore store(std::move(triples));
  const kg::FederatedDataset dataset = kg::federate_split(store, vocab, 2, {}, 5);
  const kg::DatasetStats stats = kg::shard_stats(dataset);
  REQUIRE(stats.per_client.size() == 2);
  CHECK(stats.per_client[0].relations == 1);
  CHECK(stats.per_client[1].relations == 1);
  CHECK(stats.per_client[0].triples + stats.per_client[1].triples == 10);
  CHECK(stats.avg_triples == doctest::Approx(5.0));
  CHECK(stats.avg_relations == doctest::Approx(1.0));

  // Single-client split of the same store counts every triple.
  const kg::DatasetStats one = shard_stats(kg::federate_split(store, vocab, 1, {}, 5));
  CHECK(one.per_client[0].triples == 10);
}

TEST_CASE("split manifest round-trips the dataset bit-exactly") {
  const auto [store, vocab] = random_store(25, 6, 150, 8);
  const kg::FederatedDataset dataset = kg::federate_split(store, vocab, 3, {}, 21);
  const auto dir = temp_dir();
  kg::write_split(dir, dataset, 21);
  const kg::FederatedDataset reloaded = kg::load_split(dir / "manifest.txt");
  CHECK(dataset == reloaded);

  // Same split, same seed: byte-identical files.
  const auto dir2 = temp_dir();
  kg::write_split(dir2, kg::federate_split(store, vocab, 3, {}, 21), 21);
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path other = dir2 / fs::relative(entry.path(), dir);
    std::ifstream a(entry.path(), std::ios::binary), b(other, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
  }
  fs::remove_all(dir);
  fs::remove_all(dir2);
}
