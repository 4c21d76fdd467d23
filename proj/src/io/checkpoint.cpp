// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/io/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "fedkge/io/bytes.hpp"

namespace fedkge::io {
namespace {

constexpr char kMagic[8] = {'F', 'K', 'G', 'E', 'C', 'K', 'P', '1'};
constexpr uint32_t kVersion = 1;

void put_metrics(ByteWriter& w, const eval::Metrics& m) {
  w.put<double>(m.mrr);
  w.put<double>(m.hits1);
  w.put<double>(m.hits5);
  w.put<double>(m.hits10);
  w.put<int64_t>(m.queries);
}

eval::Metrics get_metrics(ByteReader& r) {
  eval::Metrics m;
  m.mrr = r.get<double>();
  m.hits1 = r.get<double>();
  m.hits5 = r.get<double>();
  m.hits10 = r.get<double>();
  m.queries = r.get<int64_t>();
  return m;
}

void put_labels(ByteWriter& w, const std::vector<std::string>& labels) {
  w.put<uint64_t>(labels.size());
  for (const std::string& s : labels) w.put_string(s);
}

std::vector<std::string> get_labels(ByteReader& r) {
  std::vector<std::string> labels(r.get<uint64_t>());
  for (std::string& s : labels) s = r.get_string();
  return labels;
}

std::vector<uint8_t> encode_models(const std::vector<ClientParams>& models) {
  ByteWriter w;
  w.put<uint64_t>(models.size());
  for (const ClientParams& m : models) {
    w.put<int32_t>(m.client);
    put_labels(w, m.entity_labels);
    put_labels(w, m.relation_labels);
    w.put_matrix(m.entities);
    w.put_matrix(m.relations);
  }
  return w.take();
}

std::vector<ClientParams> decode_models(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes);
  std::vector<ClientParams> models(r.get<uint64_t>());
  for (ClientParams& m : models) {
    m.client = r.get<int32_t>();
    m.entity_labels = get_labels(r);
    m.relation_labels = get_labels(r);
    m.entities = r.get_matrix();
    m.relations = r.get_matrix();
  }
  if (!r.exhausted()) throw std::runtime_error("checkpoint: trailing model bytes");
  return models;
}

std::vector<uint8_t> encode_best(const BestRecord& best) {
  ByteWriter w;
  w.put<int64_t>(best.point);
  w.put<uint64_t>(best.client_ids.size());
  for (size_t i = 0; i < best.client_ids.size(); ++i) {
    w.put<int32_t>(best.client_ids[i]);
    w.put<int64_t>(best.client_points.empty() ? best.point : best.client_points[i]);
    put_metrics(w, best.per_client[i]);
  }
  put_metrics(w, best.average);
  return w.take();
}

BestRecord decode_best(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes);
  BestRecord best;
  best.point = r.get<int64_t>();
  const auto n = r.get<uint64_t>();
  for (uint64_t i = 0; i < n; ++i) {
    best.client_ids.push_back(r.get<int32_t>());
    best.client_points.push_back(r.get<int64_t>());
    best.per_client.push_back(get_metrics(r));
  }
  best.average = get_metrics(r);
  return best;
}

void put_optimizer(ByteWriter& w, const OptimizerDump& opt) {
  w.put_matrix(opt.first_moment);
  w.put_matrix(opt.second_moment);
  w.put<uint64_t>(opt.step_counts.size());
  for (int64_t s : opt.step_counts) w.put<int64_t>(s);
}

OptimizerDump get_optimizer(ByteReader& r) {
  OptimizerDump opt;
  opt.first_moment = r.get_matrix();
  opt.second_moment = r.get_matrix();
  opt.step_counts.resize(r.get<uint64_t>());
  for (int64_t& s : opt.step_counts) s = r.get<int64_t>();
  return opt;
}

std::vector<uint8_t> encode_resume(const ResumeRecord& resume) {
  ByteWriter w;
  w.put_matrix(resume.server_entities);
  w.put<int64_t>(resume.server_round);
  w.put_string(resume.server_rng);
  w.put<uint64_t>(resume.clients.size());
  for (const ClientResume& c : resume.clients) {
    w.put_matrix(c.entities);
    w.put_matrix(c.relations);
    put_optimizer(w, c.entity_opt);
    put_optimizer(w, c.relation_opt);
    w.put_string(c.rng_state);
  }
  w.put<int64_t>(resume.next_round);
  w.put<int32_t>(resume.non_improving);
  w.put<double>(resume.best_mrr);
  w.put<int64_t>(resume.best_round);
  w.put_matrix(resume.best_server_entities);
  w.put<uint64_t>(resume.best_client_relations.size());
  for (const EmbeddingMatrix& m : resume.best_client_relations) w.put_matrix(m);
  w.put<int64_t>(resume.best_eval.point);
  w.put<uint64_t>(resume.best_eval.client_ids.size());
  for (size_t i = 0; i < resume.best_eval.client_ids.size(); ++i) {
    w.put<int32_t>(resume.best_eval.client_ids[i]);
    put_metrics(w, resume.best_eval.per_client[i]);
  }
  put_metrics(w, resume.best_eval.average);
  return w.take();
}

ResumeRecord decode_resume(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes);
  ResumeRecord resume;
  resume.server_entities = r.get_matrix();
  resume.server_round = r.get<int64_t>();
  resume.server_rng = r.get_string();
  resume.clients.resize(r.get<uint64_t>());
  for (ClientResume& c : resume.clients) {
    c.entities = r.get_matrix();
    c.relations = r.get_matrix();
    c.entity_opt = get_optimizer(r);
    c.relation_opt = get_optimizer(r);
    c.rng_state = r.get_string();
  }
  resume.next_round = r.get<int64_t>();
  resume.non_improving = r.get<int32_t>();
  resume.best_mrr = r.get<double>();
  resume.best_round = r.get<int64_t>();
  resume.best_server_entities = r.get_matrix();
  resume.best_client_relations.resize(r.get<uint64_t>());
  for (EmbeddingMatrix& m : resume.best_client_relations) m = r.get_matrix();
  resume.best_eval.point = r.get<int64_t>();
  const auto n_eval = r.get<uint64_t>();
  for (uint64_t i = 0; i < n_eval; ++i) {
    resume.best_eval.client_ids.push_back(r.get<int32_t>());
    resume.best_eval.per_client.push_back(get_metrics(r));
  }
  resume.best_eval.average = get_metrics(r);
  if (!r.exhausted()) throw std::runtime_error("checkpoint: trailing resume bytes");
  return resume;
}

std::vector<uint8_t> encode_fusion(const FusionRecord& fusion) {
  ByteWriter w;
  w.put<uint64_t>(fusion.client_ids.size());
  for (size_t i = 0; i < fusion.client_ids.size(); ++i) {
    w.put<int32_t>(fusion.client_ids[i]);
    w.put<double>(fusion.weights[i][0]);
    w.put<double>(fusion.weights[i][1]);
    w.put<double>(fusion.biases[i]);
  }
  return w.take();
}

FusionRecord decode_fusion(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes);
  FusionRecord fusion;
  const auto n = r.get<uint64_t>();
  for (uint64_t i = 0; i < n; ++i) {
    fusion.client_ids.push_back(r.get<int32_t>());
    std::array<double, 2> w{r.get<double>(), r.get<double>()};
    fusion.weights.push_back(w);
    fusion.biases.push_back(r.get<double>());
  }
  return fusion;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::vector<std::pair<std::string, std::vector<uint8_t>>> sections;
  sections.emplace_back("config", std::vector<uint8_t>(checkpoint.config_json.begin(),
                                                       checkpoint.config_json.end()));
  sections.emplace_back("models", encode_models(checkpoint.models));
  if (checkpoint.fed_models)
    sections.emplace_back("models-fed", encode_models(*checkpoint.fed_models));
  sections.emplace_back("best", encode_best(checkpoint.best));
  if (checkpoint.resume) sections.emplace_back("resume", encode_resume(*checkpoint.resume));
  if (checkpoint.fusion) sections.emplace_back("fusion", encode_fusion(*checkpoint.fusion));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  ByteWriter header;
  header.put<uint32_t>(kVersion);
  header.put<uint32_t>(static_cast<uint32_t>(sections.size()));
  out.write(reinterpret_cast<const char*>(header.bytes().data()),
            static_cast<std::streamsize>(header.bytes().size()));
  for (const auto& [name, payload] : sections) {
    ByteWriter w;
    w.put<uint32_t>(static_cast<uint32_t>(name.size()));
    out.write(reinterpret_cast<const char*>(w.bytes().data()),
              static_cast<std::streamsize>(w.bytes().size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    ByteWriter len;
    len.put<uint64_t>(payload.size());
    out.write(reinterpret_cast<const char*>(len.bytes().data()),
              static_cast<std::streamsize>(len.bytes().size()));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());

  if (bytes.size() < sizeof(kMagic) + 8 ||
      !std::equal(kMagic, kMagic + sizeof(kMagic), bytes.begin()))
    throw std::runtime_error("not a fedkge checkpoint: " + path.string());

  ByteReader r(bytes);
  for (size_t i = 0; i < sizeof(kMagic); ++i) r.get<uint8_t>();
  const auto version = r.get<uint32_t>();
  if (version != kVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  const auto section_count = r.get<uint32_t>();

  Checkpoint checkpoint;
  for (uint32_t s = 0; s < section_count; ++s) {
    const auto name_len = r.get<uint32_t>();
    const std::vector<uint8_t> name_bytes = r.get_bytes(name_len);
    const std::string name(name_bytes.begin(), name_bytes.end());
    const auto payload_len = r.get<uint64_t>();
    const std::vector<uint8_t> payload = r.get_bytes(payload_len);

    if (name == "config")
      checkpoint.config_json.assign(payload.begin(), payload.end());
    else if (name == "models")
      checkpoint.models = decode_models(payload);
    else if (name == "models-fed")
      checkpoint.fed_models = decode_models(payload);
    else if (name == "best")
      checkpoint.best = decode_best(payload);
    else if (name == "resume")
      checkpoint.resume = decode_resume(payload);
    else if (name == "fusion")
      checkpoint.fusion = decode_fusion(payload);
    else
      throw std::runtime_error("checkpoint: unknown section '" + name + "'");
  }
  return checkpoint;
}

}  // namespace fedkge::io
