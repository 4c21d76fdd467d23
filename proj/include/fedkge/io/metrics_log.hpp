// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "fedkge/eval/evaluate.hpp"

namespace fedkge::io {

// Append-only, line-oriented metrics log. One record per line:
//
//   point<TAB>client<TAB>split<TAB>mrr<TAB>hits1<TAB>hits5<TAB>hits10<TAB>queries
//
// `point` is the round (fed) or epoch (single/entire) of the record; summary
// records across differently-stopped clients use point = -1. `client` is a
// decimal id or "avg". Reals are printed with %.17g so reruns are
// byte-comparable. Format documented in docs/file_formats.md.
class MetricsLog {
 public:
  explicit MetricsLog(const std::filesystem::path& path);

  void append(int64_t point, std::string_view client, std::string_view split,
              const eval::Metrics& metrics);
  void flush();

  static std::string format_record(int64_t point, std::string_view client,
                                   std::string_view split, const eval::Metrics& metrics);

 private:
  std::ofstream out_;
};

}  // namespace fedkge::io
