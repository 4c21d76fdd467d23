// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/optim/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace fedkge::optim {

Variant variant_from_string(const std::string& name) {
  if (name == "adam") return Variant::Adam;
  if (name == "sgd") return Variant::Sgd;
  throw std::invalid_argument("unknown optimizer variant: " + name);
}

std::string to_string(Variant v) { return v == Variant::Adam ? "adam" : "sgd"; }

OptimizerState::OptimizerState(int64_t rows, int64_t cols)
    : m_(rows, cols), v_(rows, cols), steps_(static_cast<size_t>(rows), 0) {}

void OptimizerState::step(EmbeddingMatrix& params, const model::SparseRows& grads,
                          const OptimizerConfig& config) {
  if (grads.dim() != params.cols())
    throw std::invalid_argument("optimizer step: gradient width mismatch");

  if (config.variant == Variant::Sgd) {
    for (int32_t id : grads.ids()) {
      auto g = grads.row_if_present(id);
      auto p = params.row(id);
      for (size_t k = 0; k < p.size(); ++k) p[k] -= config.learning_rate * g[k];
    }
    return;
  }

  if (m_.rows() != params.rows() || m_.cols() != params.cols())
    throw std::invalid_argument("optimizer step: state shape mismatch");

  for (int32_t id : grads.ids()) {
    auto g = grads.row_if_present(id);
    auto p = params.row(id);
    auto m = m_.row(id);
    auto v = v_.row(id);
    const int64_t t = ++steps_[static_cast<size_t>(id)];
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
    for (size_t k = 0; k < p.size(); ++k) {
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g[k];
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g[k] * g[k];
      const double m_hat = m[k] / bc1;
      const double v_hat = v[k] / bc2;
      p[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

void OptimizerState::reset() {
  if (m_.rows() == 0) return;
  m_ = EmbeddingMatrix(m_.rows(), m_.cols());
  v_ = EmbeddingMatrix(v_.rows(), v_.cols());
  steps_.assign(steps_.size(), 0);
}

}  // namespace fedkge::optim
