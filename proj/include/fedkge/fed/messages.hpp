// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedkge/matrix.hpp"

namespace fedkge::fed {

// Server/client transport messages. Every exchange in a round passes through
// these encoders even in-process, so a networked carrier changes nothing
// else. Byte layouts (all integers and doubles little-endian) are documented
// in docs/file_formats.md:
//
//   DISTRIBUTE  0x01 | u64 round | u32 client | u32 rows | u32 cols | f64[rows*cols]
//   UPDATE      0x02 | u64 round | u32 client | u32 rows | u32 cols | f64[rows*cols]
//   REGISTER    0x03 | u32 client | u32 count | count * (u32 len | bytes)
//
// DISTRIBUTE and UPDATE carry an entity matrix row-major; REGISTER carries
// the client's entity labels. No message type carries relations or triples.

enum class MessageType : uint8_t { Distribute = 0x01, Update = 0x02, Register = 0x03 };

struct MatrixMessage {
  MessageType type = MessageType::Distribute;
  uint64_t round = 0;
  uint32_t client = 0;
  EmbeddingMatrix matrix;
};

struct RegisterMessage {
  uint32_t client = 0;
  std::vector<std::string> entity_labels;
};

std::vector<uint8_t> encode(const MatrixMessage& msg);
std::vector<uint8_t> encode(const RegisterMessage& msg);

MatrixMessage decode_matrix_message(const std::vector<uint8_t>& bytes);
RegisterMessage decode_register_message(const std::vector<uint8_t>& bytes);

}  // namespace fedkge::fed
