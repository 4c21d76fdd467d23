// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/eval/evaluate.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace fedkge::eval {

void Scorer::score_tails(int32_t head, int32_t relation, std::span<double> out) const {
  for (int32_t e = 0; e < entity_count(); ++e)
    out[static_cast<size_t>(e)] = score_one(head, relation, e);
}

void Scorer::score_heads(int32_t relation, int32_t tail, std::span<double> out) const {
  for (int32_t e = 0; e < entity_count(); ++e)
    out[static_cast<size_t>(e)] = score_one(e, relation, tail);
}

double KgeScorer::score_one(int32_t head, int32_t relation, int32_t tail) const {
  return model::score(spec_, entities_.row(head), relations_.row(relation),
                      entities_.row(tail));
}

int64_t rank(const Scorer& scorer, Direction direction, const kg::Triple& query_triple,
             const kg::FilterIndex& filter) {
  const int32_t n = scorer.entity_count();
  const int32_t truth = direction == Direction::Tail ? query_triple.tail : query_triple.head;
  if (truth < 0 || truth >= n) throw std::invalid_argument("rank: truth outside candidate set");

  std::vector<double> scores(static_cast<size_t>(n));
  std::span<const int32_t> known;
  if (direction == Direction::Tail) {
    scorer.score_tails(query_triple.head, query_triple.relation, scores);
    known = filter.tails_of(query_triple.head, query_triple.relation);
  } else {
    scorer.score_heads(query_triple.relation, query_triple.tail, scores);
    known = filter.heads_of(query_triple.tail, query_triple.relation);
  }

  // Candidates that form other known triples are excluded; the truth itself
  // always stays in.
  std::vector<uint8_t> excluded(static_cast<size_t>(n), 0);
  for (int32_t e : known) excluded[static_cast<size_t>(e)] = 1;
  excluded[static_cast<size_t>(truth)] = 0;

  const double truth_score = scores[static_cast<size_t>(truth)];
  int64_t higher = 0;
  int64_t tied = 0;
  for (int32_t e = 0; e < n; ++e) {
    if (e == truth || excluded[static_cast<size_t>(e)]) continue;
    const double s = scores[static_cast<size_t>(e)];
    if (s > truth_score)
      ++higher;
    else if (s == truth_score)
      ++tied;
  }
  // Mean rank of the tied block, rounded up.
  return higher + 1 + (tied + 1) / 2;
}

Metrics evaluate(const Scorer& scorer, std::span<const kg::Triple> split,
                 const kg::FilterIndex& filter, Directions directions, int threads) {
  if (split.empty()) throw std::invalid_argument("evaluate: empty split");

  struct Query {
    kg::Triple triple;
    Direction direction;
  };
  std::vector<Query> queries;
  queries.reserve(split.size() * 2);
  for (const kg::Triple& t : split) {
    if (directions != Directions::HeadOnly) queries.push_back({t, Direction::Tail});
    if (directions != Directions::TailOnly) queries.push_back({t, Direction::Head});
  }

  // Ranks land in a preallocated slot per query; the reduction below runs in
  // query order, so the result is independent of the thread count.
  std::vector<int64_t> ranks(queries.size(), 0);
  const auto worker = [&](size_t begin, size_t end) {
    for (size_t q = begin; q < end; ++q)
      ranks[q] = rank(scorer, queries[q].direction, queries[q].triple, filter);
  };
  if (threads <= 1 || queries.size() < 2) {
    worker(0, queries.size());
  } else {
    const size_t n_workers = std::min<size_t>(static_cast<size_t>(threads), queries.size());
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    const size_t chunk = (queries.size() + n_workers - 1) / n_workers;
    for (size_t w = 0; w < n_workers; ++w) {
      const size_t begin = w * chunk;
      const size_t end = std::min(queries.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end);
    }
    for (std::thread& th : pool) th.join();
  }

  Metrics m;
  m.queries = static_cast<int64_t>(ranks.size());
  for (int64_t r : ranks) {
    m.mrr += 1.0 / static_cast<double>(r);
    m.hits1 += r <= 1 ? 1.0 : 0.0;
    m.hits5 += r <= 5 ? 1.0 : 0.0;
    m.hits10 += r <= 10 ? 1.0 : 0.0;
  }
  const double n = static_cast<double>(m.queries);
  m.mrr /= n;
  m.hits1 /= n;
  m.hits5 /= n;
  m.hits10 /= n;
  return m;
}

Metrics weighted_average(std::span<const Metrics> per_client, std::span<const int64_t> weights) {
  if (per_client.empty() || per_client.size() != weights.size())
    throw std::invalid_argument("weighted_average: bad inputs");
  double total = 0.0;
  for (int64_t w : weights) {
    if (w <= 0) throw std::invalid_argument("weighted_average: weights must be positive");
    total += static_cast<double>(w);
  }
  Metrics out;
  for (size_t i = 0; i < per_client.size(); ++i) {
    const double w = static_cast<double>(weights[i]) / total;
    out.mrr += w * per_client[i].mrr;
    out.hits1 += w * per_client[i].hits1;
    out.hits5 += w * per_client[i].hits5;
    out.hits10 += w * per_client[i].hits10;
    out.queries += per_client[i].queries;
  }
  return out;
}

}  // namespace fedkge::eval
