// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/kg/triple_store.hpp"

#include <stdexcept>
#include <unordered_set>

namespace fedkge::kg {

int32_t LabelTable::add(const std::string& label) {
  auto it = index_.find(label);
  if (it != index_.end()) return it->second;
  const int32_t id = static_cast<int32_t>(labels_.size());
  labels_.push_back(label);
  index_.emplace(label, id);
  return id;
}

std::optional<int32_t> LabelTable::find(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& LabelTable::label(int32_t id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("LabelTable: id out of range");
  return labels_[static_cast<size_t>(id)];
}

void FilterIndex::add(const Triple& t) {
  by_head_[key(t.head, t.relation)].push_back(t.tail);
  by_tail_[key(t.tail, t.relation)].push_back(t.head);
  finalized_ = false;
}

void FilterIndex::add_all(std::span<const Triple> triples) {
  for (const Triple& t : triples) add(t);
}

void FilterIndex::finalize() {
  for (auto* map : {&by_head_, &by_tail_}) {
    for (auto& [k, v] : *map) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  }
  finalized_ = true;
}

bool FilterIndex::contains(const Triple& t) const {
  auto it = by_head_.find(key(t.head, t.relation));
  if (it == by_head_.end()) return false;
  const auto& tails = it->second;
  if (finalized_) return std::binary_search(tails.begin(), tails.end(), t.tail);
  return std::find(tails.begin(), tails.end(), t.tail) != tails.end();
}

std::span<const int32_t> FilterIndex::tails_of(int32_t head, int32_t relation) const {
  auto it = by_head_.find(key(head, relation));
  if (it == by_head_.end()) return {};
  return it->second;
}

std::span<const int32_t> FilterIndex::heads_of(int32_t tail, int32_t relation) const {
  auto it = by_tail_.find(key(tail, relation));
  if (it == by_tail_.end()) return {};
  return it->second;
}

TripleStore::TripleStore(std::vector<Triple> triples) : triples_(std::move(triples)) {
  for (const Triple& t : triples_) {
    if (filter_.contains(t)) throw std::invalid_argument("TripleStore: duplicate triple");
    filter_.add(t);
  }
  filter_.finalize();
}

size_t dedup_triples(std::vector<Triple>& triples) {
  struct Hash {
    size_t operator()(const Triple& t) const {
      uint64_t h = 1469598103934665603ULL;
      for (uint64_t v : {static_cast<uint64_t>(static_cast<uint32_t>(t.head)),
                         static_cast<uint64_t>(static_cast<uint32_t>(t.relation)),
                         static_cast<uint64_t>(static_cast<uint32_t>(t.tail))}) {
        h ^= v;
        h *= 1099511628211ULL;
      }
      return static_cast<size_t>(h);
    }
  };
  std::unordered_set<Triple, Hash> seen;
  seen.reserve(triples.size());
  const size_t before = triples.size();
  std::vector<Triple> kept;
  kept.reserve(triples.size());
  for (const Triple& t : triples)
    if (seen.insert(t).second) kept.push_back(t);
  triples = std::move(kept);
  return before - triples.size();
}

}  // namespace fedkge::kg
