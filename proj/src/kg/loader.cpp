// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/kg/loader.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace fedkge::kg {
namespace {

int32_t encode(LabelTable& table, const std::string& label, bool frozen,
               const char* what, const std::filesystem::path& path, size_t line_no) {
  if (!frozen) return table.add(label);
  if (auto id = table.find(label)) return *id;
  throw std::runtime_error("unknown " + std::string(what) + " label '" + label +
                           "' under frozen vocabulary (" + path.string() + ":" +
                           std::to_string(line_no) + ")");
}

}  // namespace

TripleStore load_triples(const std::filesystem::path& path, Vocabulary& vocab, bool frozen) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open triple file: " + path.string());

  std::vector<Triple> triples;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    const bool t3 = t2 != std::string::npos && line.find('\t', t2 + 1) != std::string::npos;
    if (t1 == std::string::npos || t2 == std::string::npos || t3)
      throw std::runtime_error("malformed triple line (expected 3 tab-separated fields) at " +
                               path.string() + ":" + std::to_string(line_no));

    const std::string head = line.substr(0, t1);
    const std::string rel = line.substr(t1 + 1, t2 - t1 - 1);
    const std::string tail = line.substr(t2 + 1);
    triples.push_back({encode(vocab.entities, head, frozen, "entity", path, line_no),
                       encode(vocab.relations, rel, frozen, "relation", path, line_no),
                       encode(vocab.entities, tail, frozen, "entity", path, line_no)});
  }

  const size_t dropped = dedup_triples(triples);
  if (dropped > 0)
    std::cerr << "warning: dropped " << dropped << " duplicate triple(s) from " << path.string()
              << "\n";
  return TripleStore(std::move(triples));
}

void save_triples(const std::filesystem::path& path, const TripleStore& store,
                  const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write triple file: " + path.string());
  for (const Triple& t : store.triples()) {
    out << vocab.entities.label(t.head) << '\t' << vocab.relations.label(t.relation) << '\t'
        << vocab.entities.label(t.tail) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace fedkge::kg
