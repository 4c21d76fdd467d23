// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/fed/messages.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

namespace fedkge::fed {
namespace {

static_assert(std::endian::native == std::endian::little,
              "wire encoding assumes a little-endian host");

template <typename T>
void put(std::vector<uint8_t>& out, T value) {
  const size_t at = out.size();
  out.resize(at + sizeof(T));
  std::memcpy(out.data() + at, &value, sizeof(T));
}

template <typename T>
T take(const std::vector<uint8_t>& in, size_t& at) {
  if (at + sizeof(T) > in.size()) throw std::runtime_error("message truncated");
  T value;
  std::memcpy(&value, in.data() + at, sizeof(T));
  at += sizeof(T);
  return value;
}

}  // namespace

std::vector<uint8_t> encode(const MatrixMessage& msg) {
  if (msg.type != MessageType::Distribute && msg.type != MessageType::Update)
    throw std::invalid_argument("encode: matrix message must be DISTRIBUTE or UPDATE");
  std::vector<uint8_t> out;
  const auto rows = static_cast<uint32_t>(msg.matrix.rows());
  const auto cols = static_cast<uint32_t>(msg.matrix.cols());
  out.reserve(21 + static_cast<size_t>(rows) * cols * 8);
  put<uint8_t>(out, static_cast<uint8_t>(msg.type));
  put<uint64_t>(out, msg.round);
  put<uint32_t>(out, msg.client);
  put<uint32_t>(out, rows);
  put<uint32_t>(out, cols);
  for (double v : msg.matrix.flat()) put<double>(out, v);
  return out;
}

std::vector<uint8_t> encode(const RegisterMessage& msg) {
  std::vector<uint8_t> out;
  put<uint8_t>(out, static_cast<uint8_t>(MessageType::Register));
  put<uint32_t>(out, msg.client);
  put<uint32_t>(out, static_cast<uint32_t>(msg.entity_labels.size()));
  for (const std::string& label : msg.entity_labels) {
    put<uint32_t>(out, static_cast<uint32_t>(label.size()));
    out.insert(out.end(), label.begin(), label.end());
  }
  return out;
}

MatrixMessage decode_matrix_message(const std::vector<uint8_t>& bytes) {
  size_t at = 0;
  MatrixMessage msg;
  const auto type = take<uint8_t>(bytes, at);
  if (type != static_cast<uint8_t>(MessageType::Distribute) &&
      type != static_cast<uint8_t>(MessageType::Update))
    throw std::runtime_error("decode: not a matrix message");
  msg.type = static_cast<MessageType>(type);
  msg.round = take<uint64_t>(bytes, at);
  msg.client = take<uint32_t>(bytes, at);
  const auto rows = take<uint32_t>(bytes, at);
  const auto cols = take<uint32_t>(bytes, at);
  msg.matrix = EmbeddingMatrix(rows, cols);
  for (double& v : msg.matrix.flat()) v = take<double>(bytes, at);
  if (at != bytes.size()) throw std::runtime_error("decode: trailing bytes");
  return msg;
}

RegisterMessage decode_register_message(const std::vector<uint8_t>& bytes) {
  size_t at = 0;
  if (take<uint8_t>(bytes, at) != static_cast<uint8_t>(MessageType::Register))
    throw std::runtime_error("decode: not a REGISTER message");
  RegisterMessage msg;
  msg.client = take<uint32_t>(bytes, at);
  const auto count = take<uint32_t>(bytes, at);
  msg.entity_labels.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    const auto len = take<uint32_t>(bytes, at);
    if (at + len > bytes.size()) throw std::runtime_error("message truncated");
    msg.entity_labels.emplace_back(reinterpret_cast<const char*>(bytes.data() + at), len);
    at += len;
  }
  if (at != bytes.size()) throw std::runtime_error("decode: trailing bytes");
  return msg;
}

}  // namespace fedkge::fed
