// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "fedkge/matrix.hpp"
#include "fedkge/rng.hpp"

namespace fedkge::model {

enum class ModelKind { TransE, DistMult, ComplEx, RotatE };

ModelKind model_kind_from_string(const std::string& name);
std::string to_string(ModelKind kind);

// Score-function family plus its only kind-specific knob. ComplEx and RotatE
// read entity rows as dim/2 complex numbers stored (re, im) interleaved;
// RotatE relation rows hold dim/2 phase angles, so |r_i| = 1 by construction.
struct ModelSpec {
  ModelKind kind = ModelKind::TransE;
  int transe_norm = 2;  // p in {1, 2}
};

// Relation-row width for a given entity width.
int64_t relation_dim(ModelKind kind, int64_t entity_dim);

// Complex models need an even entity width; TransE needs p in {1,2}.
void validate_spec(const ModelSpec& spec, int64_t entity_dim);

// Truth-value score of (h, r, t):
//   TransE    -|h + r - t|_p
//   DistMult  sum_i h_i r_i t_i
//   ComplEx   Re(sum_k h_k r_k conj(t_k))
//   RotatE    -sum_k |h_k rot(theta_k) - t_k|   (modulus per complex coord)
double score(const ModelSpec& spec, std::span<const double> h, std::span<const double> r,
             std::span<const double> t);

// Accumulates d(score)/d(row) * upstream into the three gradient rows.
// RotatE's relation gradient is taken with respect to the phase angles.
// Non-differentiable points (|x| at 0, vanishing norms) use subgradient 0.
void accumulate_score_grad(const ModelSpec& spec, std::span<const double> h,
                           std::span<const double> r, std::span<const double> t,
                           double upstream, std::span<double> grad_h, std::span<double> grad_r,
                           std::span<double> grad_t);

// Training hyperparameters shared by every setting.
struct TrainHyper {
  double margin = 10.0;       // gamma
  double adv_temperature = 1.0;  // alpha; 0 disables self-adversarial weighting
  int neg_per_pos = 256;
  int64_t embedding_dim = 256;
  double learning_rate = 0.001;
};

// Entities and real-valued relation rows start uniform in
// [-0.5/sqrt(dim), +0.5/sqrt(dim)]; RotatE relation rows are uniform phases
// in [0, 2*pi).
EmbeddingMatrix init_entity_matrix(int64_t rows, int64_t dim, Rng& rng);
EmbeddingMatrix init_relation_matrix(const ModelSpec& spec, int64_t rows, int64_t entity_dim,
                                     Rng& rng);

}  // namespace fedkge::model
