// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedkge/matrix.hpp"

namespace fedkge::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

class ByteWriter {
 public:
  template <typename T>
  void put(T value) {
    const size_t at = bytes_.size();
    bytes_.resize(at + sizeof(T));
    std::memcpy(bytes_.data() + at, &value, sizeof(T));
  }
  void put_string(const std::string& s) {
    put<uint64_t>(s.size());
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void put_matrix(const EmbeddingMatrix& m) {
    put<int64_t>(m.rows());
    put<int64_t>(m.cols());
    const auto flat = m.flat();
    const size_t at = bytes_.size();
    bytes_.resize(at + flat.size() * sizeof(double));
    std::memcpy(bytes_.data() + at, flat.data(), flat.size() * sizeof(double));
  }
  const std::vector<uint8_t>& bytes() const { return bytes_; }
  std::vector<uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<uint8_t>& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (at_ + sizeof(T) > bytes_.size()) throw std::runtime_error("byte stream truncated");
    T value;
    std::memcpy(&value, bytes_.data() + at_, sizeof(T));
    at_ += sizeof(T);
    return value;
  }
  std::string get_string() {
    const auto len = get<uint64_t>();
    if (at_ + len > bytes_.size()) throw std::runtime_error("byte stream truncated");
    std::string s(reinterpret_cast<const char*>(bytes_.data() + at_), len);
    at_ += len;
    return s;
  }
  EmbeddingMatrix get_matrix() {
    const auto rows = get<int64_t>();
    const auto cols = get<int64_t>();
    EmbeddingMatrix m(rows, cols);
    auto flat = m.flat();
    if (at_ + flat.size() * sizeof(double) > bytes_.size())
      throw std::runtime_error("byte stream truncated");
    std::memcpy(flat.data(), bytes_.data() + at_, flat.size() * sizeof(double));
    at_ += flat.size() * sizeof(double);
    return m;
  }
  std::vector<uint8_t> get_bytes(size_t len) {
    if (at_ + len > bytes_.size()) throw std::runtime_error("byte stream truncated");
    std::vector<uint8_t> out(bytes_.begin() + static_cast<std::ptrdiff_t>(at_),
                             bytes_.begin() + static_cast<std::ptrdiff_t>(at_ + len));
    at_ += len;
    return out;
  }
  bool exhausted() const { return at_ == bytes_.size(); }

 private:
  const std::vector<uint8_t>& bytes_;
  size_t at_ = 0;
};

}  // namespace fedkge::io
