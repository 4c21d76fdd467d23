// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fedkge::fed {

// Server-side mapping between client-local entity indexes and the global
// entity table. The permutation matrices and existence vectors of the
// protocol are realized as index arrays and boolean masks; gather/scatter
// over them is mathematically identical to the 0/1 matrix products and
// avoids the dense storage.
class EntityTable {
 public:
  // Global vocabulary = union of the clients' entity label lists, first seen
  // in client order then local order. Built from REGISTER payloads; the
  // server never sees relations or triples.
  static EntityTable build(std::span<const std::vector<std::string>> client_entity_labels);

  int32_t global_count() const { return static_cast<int32_t>(global_labels_.size()); }
  int32_t client_count() const { return static_cast<int32_t>(local_to_global_.size()); }
  const std::vector<std::string>& global_labels() const { return global_labels_; }

  // idx^c: local position -> global position (injective).
  const std::vector<int32_t>& local_to_global(int32_t client) const;
  // v^c: true exactly where a global entity exists on the client.
  const std::vector<uint8_t>& existence_mask(int32_t client) const;

 private:
  std::vector<std::string> global_labels_;
  std::vector<std::vector<int32_t>> local_to_global_;
  std::vector<std::vector<uint8_t>> masks_;
};

}  // namespace fedkge::fed
