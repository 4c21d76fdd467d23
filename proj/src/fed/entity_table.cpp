// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/fed/entity_table.hpp"

#include <stdexcept>
#include <unordered_map>

namespace fedkge::fed {

EntityTable EntityTable::build(std::span<const std::vector<std::string>> client_entity_labels) {
  if (client_entity_labels.empty())
    throw std::invalid_argument("EntityTable: need at least one client");

  EntityTable table;
  std::unordered_map<std::string, int32_t> index;
  for (const auto& labels : client_entity_labels) {
    if (labels.empty()) throw std::invalid_argument("EntityTable: client with no entities");
    std::vector<int32_t> map;
    map.reserve(labels.size());
    for (const std::string& label : labels) {
      auto it = index.find(label);
      if (it == index.end()) {
        const int32_t id = static_cast<int32_t>(table.global_labels_.size());
        it = index.emplace(label, id).first;
        table.global_labels_.push_back(label);
      }
      map.push_back(it->second);
    }
    table.local_to_global_.push_back(std::move(map));
  }

  for (const auto& map : table.local_to_global_) {
    std::vector<uint8_t> mask(table.global_labels_.size(), 0);
    for (int32_t g : map) {
      if (mask[static_cast<size_t>(g)])
        throw std::invalid_argument("EntityTable: duplicate entity label within a client");
      mask[static_cast<size_t>(g)] = 1;
    }
    table.masks_.push_back(std::move(mask));
  }
  return table;
}

const std::vector<int32_t>& EntityTable::local_to_global(int32_t client) const {
  if (client < 0 || client >= client_count())
    throw std::invalid_argument("EntityTable: unknown client id");
  return local_to_global_[static_cast<size_t>(client)];
}

const std::vector<uint8_t>& EntityTable::existence_mask(int32_t client) const {
  if (client < 0 || client >= client_count())
    throw std::invalid_argument("EntityTable: unknown client id");
  return masks_[static_cast<size_t>(client)];
}

}  // namespace fedkge::fed
