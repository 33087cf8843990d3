// Copyright 2026 The vte-nlp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vte/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vte/error.hpp"
#include "vte/rng.hpp"

namespace vte {
namespace {

template <typename T>
void read_key(const Json& j, const char* key, T& out, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string(where) + "." + key + ": " + e.what());
  }
}

void require_object(const Json& j, std::string_view where) {
  if (!j.is_object()) throw ValidationError(std::string(where) + " must be a JSON object");
}

}  // namespace

void require_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                  std::string_view where) {
  require_object(j, where);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) throw ValidationError(std::string(where) + ": unknown key '" + key + "'");
  }
}

void apply_json(const Json& j, TokenizerConfig& out, std::string_view where) {
  require_keys(j, {"preset", "max_len", "truncate", "lowercase", "pad_token", "cls_token"}, where);
  if (j.contains("preset")) out = TokenizerConfig::by_preset(j.at("preset").get<std::string>());
  read_key(j, "max_len", out.max_len, where);
  if (j.contains("truncate")) {
    const std::string side = j.at("truncate").get<std::string>();
    if (side == "left") {
      out.truncate_side = TruncateSide::kLeft;
    } else if (side == "right") {
      out.truncate_side = TruncateSide::kRight;
    } else {
      throw ValidationError(std::string(where) + ".truncate must be 'left' or 'right'");
    }
  }
  read_key(j, "lowercase", out.lowercase, where);
  read_key(j, "pad_token", out.pad_token, where);
  read_key(j, "cls_token", out.cls_token, where);
  out.validate();
}

void apply_json(const Json& j, AugmentConfig& out, std::string_view where) {
  require_keys(j, {"mode", "p_replace", "p_swap", "aug_min", "aug_max", "n", "seed"}, where);
  if (j.contains("mode")) out.mode = parse_augment_mode(j.at("mode").get<std::string>());
  read_key(j, "p_replace", out.p_replace, where);
  read_key(j, "p_swap", out.p_swap, where);
  read_key(j, "aug_min", out.aug_min, where);
  if (j.contains("aug_max")) {
    if (j.at("aug_max").is_null()) {
      out.aug_max.reset();
    } else {
      std::size_t v = 0;
      read_key(j, "aug_max", v, where);
      out.aug_max = v;
    }
  }
  read_key(j, "n", out.n, where);
  read_key(j, "seed", out.seed, where);
  out.validate();
}

void apply_json(const Json& j, EmbeddingProviderSpec& out, std::string_view where) {
  require_keys(j, {"kind", "dim", "seed", "path", "pad_token"}, where);
  if (j.contains("kind")) out.kind = parse_embedding_kind(j.at("kind").get<std::string>());
  read_key(j, "dim", out.dim, where);
  read_key(j, "seed", out.seed, where);
  if (j.contains("path")) out.path = j.at("path").get<std::string>();
  read_key(j, "pad_token", out.pad_token, where);
  out.validate();
}

void apply_json(const Json& j, ClassifierSpec& out, std::string_view where) {
  require_keys(j, {"kind", "input_dim", "hidden_size", "num_layers", "num_classes"}, where);
  if (j.contains("kind")) out.kind = parse_classifier_kind(j.at("kind").get<std::string>());
  read_key(j, "input_dim", out.input_dim, where);
  read_key(j, "hidden_size", out.hidden_size, where);
  read_key(j, "num_layers", out.num_layers, where);
  read_key(j, "num_classes", out.num_classes, where);
  out.validate();
}

void apply_json(const Json& j, TrainConfig& out, std::string_view where) {
  require_keys(j,
               {"learning_rate", "epochs", "batch_size", "seed", "early_stop_patience", "clip_norm"},
               where);
  read_key(j, "learning_rate", out.learning_rate, where);
  read_key(j, "epochs", out.epochs, where);
  read_key(j, "batch_size", out.batch_size, where);
  read_key(j, "seed", out.seed, where);
  read_key(j, "early_stop_patience", out.early_stop_patience, where);
  read_key(j, "clip_norm", out.clip_norm, where);
  out.validate();
}

void apply_json(const Json& j, SplitSpec& out, std::string_view where) {
  require_keys(j, {"test_fraction", "validation_fraction_of_train", "seed", "stratified"}, where);
  read_key(j, "test_fraction", out.test_fraction, where);
  read_key(j, "validation_fraction_of_train", out.validation_fraction_of_train, where);
  read_key(j, "seed", out.seed, where);
  read_key(j, "stratified", out.stratified, where);
  out.validate();
}

void apply_json(const Json& j, SynthSpec& out, std::string_view where) {
  require_keys(j, {"n_reports", "class_proportions", "mean_length_tokens", "negation_rate", "seed"},
               where);
  read_key(j, "n_reports", out.n_reports, where);
  read_key(j, "class_proportions", out.class_proportions, where);
  read_key(j, "mean_length_tokens", out.mean_length_tokens, where);
  read_key(j, "negation_rate", out.negation_rate, where);
  read_key(j, "seed", out.seed, where);
}

void apply_json(const Json& j, HybridConfig& out, std::string_view where) {
  require_keys(j, {"negative_confidence_cutoff", "rule_score_cutoff", "negative_class"}, where);
  read_key(j, "negative_confidence_cutoff", out.negative_confidence_cutoff, where);
  read_key(j, "rule_score_cutoff", out.rule_score_cutoff, where);
  read_key(j, "negative_class", out.negative_class, where);
  out.validate();
}

Json to_json(const TokenizerConfig& c) {
  return {{"max_len", c.max_len},
          {"truncate", c.truncate_side == TruncateSide::kLeft ? "left" : "right"},
          {"lowercase", c.lowercase},
          {"pad_token", c.pad_token},
          {"cls_token", c.cls_token}};
}

Json to_json(const AugmentConfig& c) {
  Json j = {{"mode", augment_mode_name(c.mode)},
            {"p_replace", c.p_replace},
            {"p_swap", c.p_swap},
            {"aug_min", c.aug_min},
            {"n", c.n},
            {"seed", c.seed}};
  j["aug_max"] = c.aug_max ? Json(*c.aug_max) : Json(nullptr);
  return j;
}

Json to_json(const EmbeddingProviderSpec& c) {
  return {{"kind", embedding_kind_name(c.kind)},
          {"dim", c.dim},
          {"seed", c.seed},
          {"path", c.path.string()},
          {"pad_token", c.pad_token}};
}

Json to_json(const ClassifierSpec& c) {
  return {{"kind", classifier_kind_name(c.kind)},
          {"input_dim", c.input_dim},
          {"hidden_size", c.hidden_size},
          {"num_layers", c.num_layers},
          {"num_classes", c.num_classes}};
}

Json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},   {"epochs", c.epochs},
          {"batch_size", c.batch_size},         {"seed", c.seed},
          {"early_stop_patience", c.early_stop_patience}, {"clip_norm", c.clip_norm}};
}

Json to_json(const SplitSpec& c) {
  return {{"test_fraction", c.test_fraction},
          {"validation_fraction_of_train", c.validation_fraction_of_train},
          {"seed", c.seed},
          {"stratified", c.stratified}};
}

Json to_json(const SynthSpec& c) {
  return {{"n_reports", c.n_reports},
          {"class_proportions", c.class_proportions},
          {"mean_length_tokens", c.mean_length_tokens},
          {"negation_rate", c.negation_rate},
          {"seed", c.seed}};
}

Json to_json(const HybridConfig& c) {
  return {{"negative_confidence_cutoff", c.negative_confidence_cutoff},
          {"rule_score_cutoff", c.rule_score_cutoff},
          {"negative_class", c.negative_class}};
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string content_digest(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

}  // namespace vte
