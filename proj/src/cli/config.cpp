// Copyright (c) 2026 The fedkge Authors
// SPDX-License-Identifier: Apache-2.0
#include "fedkge/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fedkge::cli {

using nlohmann::json;

Setting setting_from_string(const std::string& name) {
  if (name == "single") return Setting::Single;
  if (name == "entire") return Setting::Entire;
  if (name == "fed") return Setting::Fed;
  throw std::invalid_argument("unknown setting: " + name + " (expected single|entire|fed)");
}

std::string to_string(Setting s) {
  switch (s) {
    case Setting::Single: return "single";
    case Setting::Entire: return "entire";
    case Setting::Fed: return "fed";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

template <typename T>
void read(const json& obj, const std::string& path, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(path + key, "expected a string");
      out = v.get<std::string>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(path + key, "expected a boolean");
      out = v.get<bool>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(path + key, "expected a number");
      out = v.get<double>();
    } else {
      if (!v.is_number_integer() && !v.is_number_unsigned())
        fail(path + key, "expected an integer");
      out = v.get<T>();
    }
  } catch (const json::exception& e) {
    fail(path + key, e.what());
  }
}

void validate_ranges(const RunConfig& c) {
  if (c.embedding_dim < 1) fail("train.embedding_dim", "must be >= 1");
  model::validate_spec({c.model, c.transe_norm}, c.embedding_dim);
  if (c.adv_temperature < 0.0) fail("train.adv_temperature", "must be >= 0");
  if (c.neg_per_pos < 1) fail("train.neg_per_pos", "must be >= 1");
  if (c.learning_rate <= 0.0) fail("train.learning_rate", "must be > 0");
  if (c.batch_size < 1) fail("train.batch_size", "must be >= 1");
  if (c.corruption != "both" && c.corruption != "tail")
    fail("train.corruption", "expected both|tail");
  optim::variant_from_string(c.optimizer);
  if (c.client_fraction <= 0.0 || c.client_fraction > 1.0)
    fail("fed.client_fraction", "must be in (0, 1]");
  if (c.local_epochs < 0) fail("fed.local_epochs", "must be >= 0");
  if (c.max_rounds < 0) fail("fed.max_rounds", "must be >= 0");
  if (c.eval_every_rounds < 1) fail("fed.eval_every_rounds", "must be >= 1");
  if (c.fed_patience < 0) fail("fed.patience", "must be >= 0");
  if (c.max_epochs < 0) fail("local.max_epochs", "must be >= 0");
  if (c.eval_every_epochs < 1) fail("local.eval_every_epochs", "must be >= 1");
  if (c.local_patience < 0) fail("local.patience", "must be >= 0");
  if (c.fusion_margin <= 0.0) fail("fusion.margin", "must be > 0");
  if (c.fusion_neg_per_pos < 1) fail("fusion.neg_per_pos", "must be >= 1");
  if (c.fusion_epochs < 0) fail("fusion.epochs", "must be >= 0");
  if (c.fusion_learning_rate <= 0.0) fail("fusion.learning_rate", "must be > 0");
  if (c.fusion_batch_size < 1) fail("fusion.batch_size", "must be >= 1");
  if (c.fusion_split != "valid" && c.fusion_split != "train")
    fail("fusion.split", "expected valid|train");
  if (c.directions != "both" && c.directions != "tail" && c.directions != "head")
    fail("eval.directions", "expected both|tail|head");
  if (c.threads < 1) fail("threads", "must be >= 1");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config: top level must be an object");

  check_keys(root, "",
             {"setting", "model", "manifest", "seed", "out_dir", "threads", "train", "fed",
              "local", "fusion", "eval"});

  RunConfig c;
  std::string setting_name = to_string(c.setting);
  std::string model_name = model::to_string(c.model);
  read(root, "", "setting", setting_name);
  read(root, "", "model", model_name);
  read(root, "", "manifest", c.manifest);
  read(root, "", "seed", c.seed);
  read(root, "", "out_dir", c.out_dir);
  read(root, "", "threads", c.threads);
  c.setting = setting_from_string(setting_name);
  c.model = model::model_kind_from_string(model_name);

  if (root.contains("train")) {
    const json& t = root.at("train");
    if (!t.is_object()) fail("train", "expected an object");
    check_keys(t, "train",
               {"embedding_dim", "margin", "adv_temperature", "neg_per_pos", "learning_rate",
                "batch_size", "transe_norm", "corruption", "strict_negatives", "optimizer",
                "reset_optimizer_each_round"});
    read(t, "train.", "embedding_dim", c.embedding_dim);
    read(t, "train.", "margin", c.margin);
    read(t, "train.", "adv_temperature", c.adv_temperature);
    read(t, "train.", "neg_per_pos", c.neg_per_pos);
    read(t, "train.", "learning_rate", c.learning_rate);
    read(t, "train.", "batch_size", c.batch_size);
    read(t, "train.", "transe_norm", c.transe_norm);
    read(t, "train.", "corruption", c.corruption);
    read(t, "train.", "strict_negatives", c.strict_negatives);
    read(t, "train.", "optimizer", c.optimizer);
    read(t, "train.", "reset_optimizer_each_round", c.reset_optimizer_each_round);
  }
  if (root.contains("fed")) {
    const json& t = root.at("fed");
    if (!t.is_object()) fail("fed", "expected an object");
    check_keys(t, "fed",
               {"client_fraction", "local_epochs", "max_rounds", "eval_every_rounds",
                "patience"});
    read(t, "fed.", "client_fraction", c.client_fraction);
    read(t, "fed.", "local_epochs", c.local_epochs);
    read(t, "fed.", "max_rounds", c.max_rounds);
    read(t, "fed.", "eval_every_rounds", c.eval_every_rounds);
    read(t, "fed.", "patience", c.fed_patience);
  }
  if (root.contains("local")) {
    const json& t = root.at("local");
    if (!t.is_object()) fail("local", "expected an object");
    check_keys(t, "local", {"max_epochs", "eval_every_epochs", "patience"});
    read(t, "local.", "max_epochs", c.max_epochs);
    read(t, "local.", "eval_every_epochs", c.eval_every_epochs);
    read(t, "local.", "patience", c.local_patience);
  }
  if (root.contains("fusion")) {
    const json& t = root.at("fusion");
    if (!t.is_object()) fail("fusion", "expected an object");
    check_keys(t, "fusion",
               {"margin", "neg_per_pos", "epochs", "learning_rate", "batch_size", "split"});
    read(t, "fusion.", "margin", c.fusion_margin);
    read(t, "fusion.", "neg_per_pos", c.fusion_neg_per_pos);
    read(t, "fusion.", "epochs", c.fusion_epochs);
    read(t, "fusion.", "learning_rate", c.fusion_learning_rate);
    read(t, "fusion.", "batch_size", c.fusion_batch_size);
    read(t, "fusion.", "split", c.fusion_split);
  }
  if (root.contains("eval")) {
    const json& t = root.at("eval");
    if (!t.is_object()) fail("eval", "expected an object");
    check_keys(t, "eval", {"directions"});
    read(t, "eval.", "directions", c.directions);
  }

  validate_ranges(c);
  return c;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const RunConfig& c) {
  json root;
  root["setting"] = to_string(c.setting);
  root["model"] = model::to_string(c.model);
  root["manifest"] = c.manifest;
  root["seed"] = c.seed;
  root["out_dir"] = c.out_dir;
  root["threads"] = c.threads;
  root["train"] = {{"embedding_dim", c.embedding_dim},
                   {"margin", c.margin},
                   {"adv_temperature", c.adv_temperature},
                   {"neg_per_pos", c.neg_per_pos},
                   {"learning_rate", c.learning_rate},
                   {"batch_size", c.batch_size},
                   {"transe_norm", c.transe_norm},
                   {"corruption", c.corruption},
                   {"strict_negatives", c.strict_negatives},
                   {"optimizer", c.optimizer},
                   {"reset_optimizer_each_round", c.reset_optimizer_each_round}};
  root["fed"] = {{"client_fraction", c.client_fraction},
                 {"local_epochs", c.local_epochs},
                 {"max_rounds", c.max_rounds},
                 {"eval_every_rounds", c.eval_every_rounds},
                 {"patience", c.fed_patience}};
  root["local"] = {{"max_epochs", c.max_epochs},
                   {"eval_every_epochs", c.eval_every_epochs},
                   {"patience", c.local_patience}};
  root["fusion"] = {{"margin", c.fusion_margin},
                    {"neg_per_pos", c.fusion_neg_per_pos},
                    {"epochs", c.fusion_epochs},
                    {"learning_rate", c.fusion_learning_rate},
                    {"batch_size", c.fusion_batch_size},
                    {"split", c.fusion_split}};
  root["eval"] = {{"directions", c.directions}};
  return root.dump(2) + "\n";
}

fed::TrainSettings train_settings(const RunConfig& c) {
  fed::TrainSettings s;
  s.spec = {c.model, c.transe_norm};
  s.hyper = {c.margin, c.adv_temperature, c.neg_per_pos, c.embedding_dim, c.learning_rate};
  s.optimizer.learning_rate = c.learning_rate;
  s.optimizer.variant = optim::variant_from_string(c.optimizer);
  s.sampler.mode = c.corruption == "tail" ? model::CorruptionMode::TailOnly
                                          : model::CorruptionMode::Both;
  s.sampler.strict = c.strict_negatives;
  s.batch_size = c.batch_size;
  s.reset_optimizer_each_round = c.reset_optimizer_each_round;
  return s;
}

fed::RoundConfig round_config(const RunConfig& c) {
  fed::RoundConfig r;
  r.client_fraction = c.client_fraction;
  r.local_epochs = c.local_epochs;
  r.batch_size = c.batch_size;
  r.max_rounds = c.max_rounds;
  r.eval_every = c.eval_every_rounds;
  r.patience = c.fed_patience;
  return r;
}

fusion::FusionConfig fusion_config(const RunConfig& c) {
  fusion::FusionConfig f;
  f.margin = c.fusion_margin;
  f.neg_per_pos = c.fusion_neg_per_pos;
  f.epochs = c.fusion_epochs;
  f.learning_rate = c.fusion_learning_rate;
  f.batch_size = c.fusion_batch_size;
  return f;
}

eval::Directions eval_directions(const RunConfig& c) {
  if (c.directions == "tail") return eval::Directions::TailOnly;
  if (c.directions == "head") return eval::Directions::HeadOnly;
  return eval::Directions::Both;
}

}  // namespace fedkge::cli
