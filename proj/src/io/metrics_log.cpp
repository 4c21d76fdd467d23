// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/io/metrics_log.hpp"

#include <cstdio>
#include <stdexcept>

namespace fedkge::io {

MetricsLog::MetricsLog(const std::filesystem::path& path) : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open metrics log: " + path.string());
  out_ << "# fedkge metrics v1\n";
  out_ << "# point\tclient\tsplit\tmrr\thits1\thits5\thits10\tqueries\n";
}

std::string MetricsLog::format_record(int64_t point, std::string_view client,
                                      std::string_view split, const eval::Metrics& metrics) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%lld\t%.*s\t%.*s\t%.17g\t%.17g\t%.17g\t%.17g\t%lld\n",
                static_cast<long long>(point), static_cast<int>(client.size()), client.data(),
                static_cast<int>(split.size()), split.data(), metrics.mrr, metrics.hits1,
                metrics.hits5, metrics.hits10, static_cast<long long>(metrics.queries));
  return buf;
}

void MetricsLog::append(int64_t point, std::string_view client, std::string_view split,
                        const eval::Metrics& metrics) {
  out_ << format_record(point, client, split, metrics);
}

void MetricsLog::flush() { out_.flush(); }

}  // namespace fedkge::io
