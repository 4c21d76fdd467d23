// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedkge/kg/triple_store.hpp"
#include "fedkge/matrix.hpp"
#include "fedkge/model/model.hpp"

namespace fedkge::eval {

// Read-only triple scorer over a fixed entity id space [0, entity_count).
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual int32_t entity_count() const = 0;
  virtual double score_one(int32_t head, int32_t relation, int32_t tail) const = 0;
  // Scores (head, relation, e) for every entity e into out[entity_count].
  virtual void score_tails(int32_t head, int32_t relation, std::span<double> out) const;
  virtual void score_heads(int32_t relation, int32_t tail, std::span<double> out) const;
};

class KgeScorer final : public Scorer {
 public:
  KgeScorer(model::ModelSpec spec, const EmbeddingMatrix& entities,
            const EmbeddingMatrix& relations)
      : spec_(spec), entities_(entities), relations_(relations) {}

  int32_t entity_count() const override { return static_cast<int32_t>(entities_.rows()); }
  double score_one(int32_t head, int32_t relation, int32_t tail) const override;

 private:
  model::ModelSpec spec_;
  const EmbeddingMatrix& entities_;
  const EmbeddingMatrix& relations_;
};

enum class Direction { Tail, Head };
enum class Directions { Both, TailOnly, HeadOnly };

// Filtered rank of `truth` for the query (head, relation, ?) or (?, relation,
// tail). Candidates forming other known triples of `filter` are removed (the
// truth itself always survives). Ties take the mean rank of the tied block,
// rounded up.
int64_t rank(const Scorer& scorer, Direction direction, const kg::Triple& query_triple,
             const kg::FilterIndex& filter);

struct Metrics {
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits5 = 0.0;
  double hits10 = 0.0;
  int64_t queries = 0;
};

// One ranking query per test triple and direction; MRR is the mean reciprocal
// rank, Hits@N the fraction of queries with rank <= N. `threads` only changes
// the schedule, never the result.
Metrics evaluate(const Scorer& scorer, std::span<const kg::Triple> split,
                 const kg::FilterIndex& filter, Directions directions, int threads = 1);

// Metric average with weights proportional to per-client query counts.
Metrics weighted_average(std::span<const Metrics> per_client, std::span<const int64_t> weights);

}  // namespace fedkge::eval
