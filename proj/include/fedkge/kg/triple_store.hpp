// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace fedkge::kg {

// Integer-encoded fact. Ids are dense indexes into the owning vocabulary.
// Self-loops (head == tail) are permitted.
struct Triple {
  int32_t head = 0;
  int32_t relation = 0;
  int32_t tail = 0;

  bool operator==(const Triple&) const = default;
};

// Ordered label list with an exact reverse map. Id of a label equals its
// position; labels are unique.
class LabelTable {
 public:
  int32_t add(const std::string& label);                  // returns existing id on repeat
  std::optional<int32_t> find(const std::string& label) const;
  const std::string& label(int32_t id) const;
  int32_t size() const { return static_cast<int32_t>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }

  bool operator==(const LabelTable& o) const { return labels_ == o.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int32_t> index_;
};

struct Vocabulary {
  LabelTable entities;
  LabelTable relations;

  bool operator==(const Vocabulary&) const = default;
};

// Lookup of known neighbors: (head, relation) -> tails and (tail, relation)
// -> heads. Backs both negative-sample filtering and filtered ranking.
class FilterIndex {
 public:
  void add(const Triple& t);
  void add_all(std::span<const Triple> triples);
  // Sorts and dedups the neighbor lists; call once after the last add.
  void finalize();

  bool contains(const Triple& t) const;
  std::span<const int32_t> tails_of(int32_t head, int32_t relation) const;
  std::span<const int32_t> heads_of(int32_t tail, int32_t relation) const;

 private:
  static uint64_t key(int32_t entity, int32_t relation) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(entity)) << 32) |
           static_cast<uint32_t>(relation);
  }
  std::unordered_map<uint64_t, std::vector<int32_t>> by_head_;
  std::unordered_map<uint64_t, std::vector<int32_t>> by_tail_;
  bool finalized_ = false;
};

// Triple list plus its filter index. Duplicates are rejected at build time;
// the index contains exactly the listed triples.
class TripleStore {
 public:
  TripleStore() = default;
  explicit TripleStore(std::vector<Triple> triples);

  const std::vector<Triple>& triples() const { return triples_; }
  const FilterIndex& filter() const { return filter_; }
  size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  bool operator==(const TripleStore& o) const { return triples_ == o.triples_; }

 private:
  std::vector<Triple> triples_;
  FilterIndex filter_;
};

// Drops exact duplicates, preserving first occurrence. Returns the number
// dropped so callers can warn.
size_t dedup_triples(std::vector<Triple>& triples);

}  // namespace fedkge::kg
