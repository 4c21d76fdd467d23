// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>

namespace fedkge {

// Deterministic RNG. std::mt19937_64's output sequence is fixed by the
// standard; the bounded-draw, uniform-double and shuffle routines are
// hand-rolled here because the std distributions are implementation-defined
// and byte-exact reproducibility across toolchains is a contract of this
// project.
class Rng {
 public:
  Rng() : gen_(0) {}
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, n). Rejection sampling, no modulo bias.
  uint64_t below(uint64_t n) {
    if (n == 0) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v = gen_();
    while (v >= limit) v = gen_();
    return v % n;
  }

  // Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Engine state round-trips through text; used by resumable checkpoints.
  std::string save_state() const {
    std::ostringstream os;
    os << gen_;
    return os.str();
  }
  void load_state(const std::string& s) {
    std::istringstream is(s);
    is >> gen_;
  }

  bool operator==(const Rng& other) const { return gen_ == other.gen_; }

 private:
  std::mt19937_64 gen_;
};

// FNV-1a over a seed, a purpose tag and an index. Gives every component its
// own independent, reproducible stream.
inline uint64_t derive_seed(uint64_t seed, std::string_view tag, uint64_t index = 0) {
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (i * 8)) & 0xFF;
      h *= 1099511628211ULL;
    }
  };
  mix(seed);
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  mix(index);
  return h;
}

}  // namespace fedkge
