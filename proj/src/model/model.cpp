// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/model/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fedkge::model {
namespace {

void check_dims(std::span<const double> h, std::span<const double> r, std::span<const double> t,
                size_t rel_expected) {
  if (h.size() != t.size() || r.size() != rel_expected)
    throw std::invalid_argument("score: embedding dimension mismatch");
}

double transe_score(std::span<const double> h, std::span<const double> r,
                    std::span<const double> t, int p) {
  double acc = 0.0;
  if (p == 1) {
    for (size_t i = 0; i < h.size(); ++i) acc += std::abs(h[i] + r[i] - t[i]);
    return -acc;
  }
  for (size_t i = 0; i < h.size(); ++i) {
    const double d = h[i] + r[i] - t[i];
    acc += d * d;
  }
  return -std::sqrt(acc);
}

double distmult_score(std::span<const double> h, std::span<const double> r,
                      std::span<const double> t) {
  double acc = 0.0;
  for (size_t i = 0; i < h.size(); ++i) acc += h[i] * r[i] * t[i];
  return acc;
}

// Rows hold dim/2 complex values as (re, im) pairs.
double complex_score(std::span<const double> h, std::span<const double> r,
                     std::span<const double> t) {
  double acc = 0.0;
  for (size_t k = 0; k + 1 < h.size(); k += 2) {
    const double hr = h[k], hi = h[k + 1];
    const double rr = r[k], ri = r[k + 1];
    const double tr = t[k], ti = t[k + 1];
    // Re((h * r) * conj(t))
    acc += (hr * rr - hi * ri) * tr + (hr * ri + hi * rr) * ti;
  }
  return acc;
}

double rotate_score(std::span<const double> h, std::span<const double> phases,
                    std::span<const double> t) {
  double acc = 0.0;
  for (size_t k = 0; k < phases.size(); ++k) {
    const double c = std::cos(phases[k]);
    const double s = std::sin(phases[k]);
    const double hr = h[2 * k], hi = h[2 * k + 1];
    const double vr = hr * c - hi * s - t[2 * k];
    const double vi = hr * s + hi * c - t[2 * k + 1];
    acc += std::sqrt(vr * vr + vi * vi);
  }
  return -acc;
}

}  // namespace

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "TransE" || name == "transe") return ModelKind::TransE;
  if (name == "DistMult" || name == "distmult") return ModelKind::DistMult;
  if (name == "ComplEx" || name == "complex") return ModelKind::ComplEx;
  if (name == "RotatE" || name == "rotate") return ModelKind::RotatE;
  throw std::invalid_argument("unknown model kind: " + name);
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::TransE: return "TransE";
    case ModelKind::DistMult: return "DistMult";
    case ModelKind::ComplEx: return "ComplEx";
    case ModelKind::RotatE: return "RotatE";
  }
  return "?";
}

int64_t relation_dim(ModelKind kind, int64_t entity_dim) {
  return kind == ModelKind::RotatE ? entity_dim / 2 : entity_dim;
}

void validate_spec(const ModelSpec& spec, int64_t entity_dim) {
  if (entity_dim < 1) throw std::invalid_argument("embedding dim must be positive");
  if ((spec.kind == ModelKind::ComplEx || spec.kind == ModelKind::RotatE) && entity_dim % 2 != 0)
    throw std::invalid_argument("complex-valued models need an even embedding dim");
  if (spec.kind == ModelKind::TransE && spec.transe_norm != 1 && spec.transe_norm != 2)
    throw std::invalid_argument("TransE norm order must be 1 or 2");
}

double score(const ModelSpec& spec, std::span<const double> h, std::span<const double> r,
             std::span<const double> t) {
  check_dims(h, r, t, static_cast<size_t>(relation_dim(spec.kind, static_cast<int64_t>(h.size()))));
  switch (spec.kind) {
    case ModelKind::TransE: return transe_score(h, r, t, spec.transe_norm);
    case ModelKind::DistMult: return distmult_score(h, r, t);
    case ModelKind::ComplEx: return complex_score(h, r, t);
    case ModelKind::RotatE: return rotate_score(h, r, t);
  }
  return 0.0;
}

void accumulate_score_grad(const ModelSpec& spec, std::span<const double> h,
                           std::span<const double> r, std::span<const double> t,
                           double upstream, std::span<double> grad_h, std::span<double> grad_r,
                           std::span<double> grad_t) {
  switch (spec.kind) {
    case ModelKind::TransE: {
      if (spec.transe_norm == 1) {
        for (size_t i = 0; i < h.size(); ++i) {
          const double d = h[i] + r[i] - t[i];
          const double sg = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
          const double g = -sg * upstream;
          grad_h[i] += g;
          grad_r[i] += g;
          grad_t[i] -= g;
        }
        return;
      }
      double norm = 0.0;
      for (size_t i = 0; i < h.size(); ++i) {
        const double d = h[i] + r[i] - t[i];
        norm += d * d;
      }
      norm = std::sqrt(norm);
      if (norm == 0.0) return;
      for (size_t i = 0; i < h.size(); ++i) {
        const double d = h[i] + r[i] - t[i];
        const double g = -(d / norm) * upstream;
        grad_h[i] += g;
        grad_r[i] += g;
        grad_t[i] -= g;
      }
      return;
    }
    case ModelKind::DistMult: {
      for (size_t i = 0; i < h.size(); ++i) {
        grad_h[i] += r[i] * t[i] * upstream;
        grad_r[i] += h[i] * t[i] * upstream;
        grad_t[i] += h[i] * r[i] * upstream;
      }
      return;
    }
    case ModelKind::ComplEx: {
      for (size_t k = 0; k + 1 < h.size(); k += 2) {
        const double hr = h[k], hi = h[k + 1];
        const double rr = r[k], ri = r[k + 1];
        const double tr = t[k], ti = t[k + 1];
        grad_h[k] += (rr * tr + ri * ti) * upstream;
        grad_h[k + 1] += (-ri * tr + rr * ti) * upstream;
        grad_r[k] += (hr * tr + hi * ti) * upstream;
        grad_r[k + 1] += (-hi * tr + hr * ti) * upstream;
        grad_t[k] += (hr * rr - hi * ri) * upstream;
        grad_t[k + 1] += (hr * ri + hi * rr) * upstream;
      }
      return;
    }
    case ModelKind::RotatE: {
      for (size_t k = 0; k < r.size(); ++k) {
        const double c = std::cos(r[k]);
        const double s = std::sin(r[k]);
        const double hr = h[2 * k], hi = h[2 * k + 1];
        const double tr = t[2 * k], ti = t[2 * k + 1];
        const double vr = hr * c - hi * s - tr;
        const double vi = hr * s + hi * c - ti;
        const double mod = std::sqrt(vr * vr + vi * vi);
        if (mod == 0.0) continue;
        const double gr = -(vr / mod) * upstream;  // d(score)/d(vr)
        const double gi = -(vi / mod) * upstream;
        grad_h[2 * k] += gr * c + gi * s;
        grad_h[2 * k + 1] += -gr * s + gi * c;
        grad_t[2 * k] += -gr;
        grad_t[2 * k + 1] += -gi;
        // dvr/dtheta = -(hr s + hi c), dvi/dtheta = hr c - hi s
        grad_r[k] += gr * (-(hr * s + hi * c)) + gi * (hr * c - hi * s);
      }
      return;
    }
  }
}

EmbeddingMatrix init_entity_matrix(int64_t rows, int64_t dim, Rng& rng) {
  const double bound = 0.5 / std::sqrt(static_cast<double>(dim));
  return EmbeddingMatrix::uniform(rows, dim, -bound, bound, rng);
}

EmbeddingMatrix init_relation_matrix(const ModelSpec& spec, int64_t rows, int64_t entity_dim,
                                     Rng& rng) {
  const int64_t dim = relation_dim(spec.kind, entity_dim);
  if (spec.kind == ModelKind::RotatE)
    return EmbeddingMatrix::uniform(rows, dim, 0.0, 2.0 * std::numbers::pi, rng);
  const double bound = 0.5 / std::sqrt(static_cast<double>(entity_dim));
  return EmbeddingMatrix::uniform(rows, dim, -bound, bound, rng);
}

}  // namespace fedkge::model
