// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedkge/matrix.hpp"
#include "fedkge/model/loss.hpp"

namespace fedkge::optim {

enum class Variant { Adam, Sgd };

Variant variant_from_string(const std::string& name);
std::string to_string(Variant v);

struct OptimizerConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Variant variant = Variant::Adam;
};

// Lazy (per-row) Adam state for one parameter matrix. Moments and step
// counters exist per row and advance only when that row receives gradient,
// so rows absent from a batch stay bitwise untouched.
class OptimizerState {
 public:
  OptimizerState() = default;
  OptimizerState(int64_t rows, int64_t cols);

  // Applies one update to exactly the rows present in `grads`.
  // Adam: per-row bias-corrected moments using that row's own step count.
  // Sgd:  row -= learning_rate * grad.
  void step(EmbeddingMatrix& params, const model::SparseRows& grads,
            const OptimizerConfig& config);

  void reset();  // zeroes moments and counters (round-reset mode)

  const EmbeddingMatrix& first_moment() const { return m_; }
  const EmbeddingMatrix& second_moment() const { return v_; }
  const std::vector<int64_t>& step_counts() const { return steps_; }

  // Checkpoint access.
  EmbeddingMatrix& mutable_first_moment() { return m_; }
  EmbeddingMatrix& mutable_second_moment() { return v_; }
  std::vector<int64_t>& mutable_step_counts() { return steps_; }

 private:
  EmbeddingMatrix m_;
  EmbeddingMatrix v_;
  std::vector<int64_t> steps_;
};

}  // namespace fedkge::optim
