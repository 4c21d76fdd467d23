// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "fedkge/kg/triple_store.hpp"

namespace fedkge::kg {

// Reads a tab-separated triple file (head<TAB>relation<TAB>tail, UTF-8, one
// triple per line) and integer-encodes it against `vocab`.
//
// With frozen == false the vocabulary is extended in first-occurrence order.
// With frozen == true an unknown label raises std::runtime_error.
// Malformed lines (field count != 3) raise with the 1-based line number.
// Exact duplicate triples are dropped with a warning on stderr.
TripleStore load_triples(const std::filesystem::path& path, Vocabulary& vocab,
                         bool frozen = false);

// Writes triples back out in the same tab-separated format, one per line,
// in stored order. Inverse of load_triples for a fixed vocabulary.
void save_triples(const std::filesystem::path& path, const TripleStore& store,
                  const Vocabulary& vocab);

}  // namespace fedkge::kg
