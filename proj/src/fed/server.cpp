// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/fed/server.hpp"

#include <cstring>
#include <stdexcept>

#include "fedkge/model/model.hpp"

namespace fedkge::fed {

ServerState make_server(std::span<const std::vector<uint8_t>> register_payloads,
                        int64_t embedding_dim, uint64_t seed) {
  std::vector<std::vector<std::string>> label_lists;
  label_lists.reserve(register_payloads.size());
  for (size_t i = 0; i < register_payloads.size(); ++i) {
    RegisterMessage msg = decode_register_message(register_payloads[i]);
    if (msg.client != i)
      throw std::invalid_argument("make_server: REGISTER messages must arrive in client order");
    label_lists.push_back(std::move(msg.entity_labels));
  }

  ServerState server;
  server.table = EntityTable::build(label_lists);
  Rng init_rng(derive_seed(seed, "entity-init"));
  server.entities =
      model::init_entity_matrix(server.table.global_count(), embedding_dim, init_rng);
  server.selection_rng = Rng(derive_seed(seed, "client-selection"));
  return server;
}

EmbeddingMatrix distribute(const ServerState& server, int32_t client) {
  const std::vector<int32_t>& map = server.table.local_to_global(client);
  EmbeddingMatrix local(static_cast<int64_t>(map.size()), server.entities.cols());
  for (size_t j = 0; j < map.size(); ++j) {
    auto src = server.entities.row(map[j]);
    auto dst = local.row(static_cast<int64_t>(j));
    std::memcpy(dst.data(), src.data(), src.size() * sizeof(double));
  }
  return local;
}

EmbeddingMatrix aggregate(const EntityTable& table,
                          std::span<const std::pair<int32_t, EmbeddingMatrix>> updates,
                          const EmbeddingMatrix& previous) {
  const int32_t n = table.global_count();
  if (previous.rows() != n) throw std::invalid_argument("aggregate: previous matrix shape");
  const int64_t dim = previous.cols();

  EmbeddingMatrix sum(n, dim);
  std::vector<int32_t> owners(static_cast<size_t>(n), 0);
  for (const auto& [client, update] : updates) {
    const std::vector<int32_t>& map = table.local_to_global(client);
    if (update.rows() != static_cast<int64_t>(map.size()) || update.cols() != dim)
      throw std::invalid_argument("aggregate: update shape mismatch for client " +
                                  std::to_string(client));
    for (size_t j = 0; j < map.size(); ++j) {
      auto dst = sum.row(map[j]);
      auto src = update.row(static_cast<int64_t>(j));
      for (size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
      ++owners[static_cast<size_t>(map[j])];
    }
  }

  EmbeddingMatrix out(n, dim);
  for (int32_t i = 0; i < n; ++i) {
    auto dst = out.row(i);
    if (owners[static_cast<size_t>(i)] > 0) {
      auto src = sum.row(i);
      const double inv = static_cast<double>(owners[static_cast<size_t>(i)]);
      for (size_t k = 0; k < dst.size(); ++k) dst[k] = src[k] / inv;
    } else {
      auto src = previous.row(i);
      std::memcpy(dst.data(), src.data(), src.size() * sizeof(double));
    }
  }
  return out;
}

std::vector<uint8_t> serialize_server_state(const ServerState& server) {
  std::vector<uint8_t> out;
  auto put_u64 = [&out](uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>((v >> (i * 8)) & 0xFF));
  };
  put_u64(static_cast<uint64_t>(server.round));
  put_u64(static_cast<uint64_t>(server.table.global_count()));
  for (const std::string& label : server.table.global_labels()) {
    put_u64(label.size());
    out.insert(out.end(), label.begin(), label.end());
  }
  for (int32_t c = 0; c < server.table.client_count(); ++c) {
    const auto& map = server.table.local_to_global(c);
    put_u64(map.size());
    for (int32_t g : map) put_u64(static_cast<uint64_t>(g));
  }
  put_u64(static_cast<uint64_t>(server.entities.rows()));
  put_u64(static_cast<uint64_t>(server.entities.cols()));
  for (double v : server.entities.flat()) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    put_u64(bits);
  }
  const std::string rng = server.selection_rng.save_state();
  put_u64(rng.size());
  out.insert(out.end(), rng.begin(), rng.end());
  return out;
}

}  // namespace fedkge::fed
