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

#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "vte/augment.hpp"
#include "vte/classifier.hpp"
#include "vte/corpus.hpp"
#include "vte/embed.hpp"
#include "vte/hybrid.hpp"
#include "vte/tokenizer.hpp"

namespace vte {

using Json = nlohmann::json;

// JSON views of the component configs. apply_json overlays the keys present
// in `j` onto `out` and rejects unknown keys, so a typo in a config file is an
// error rather than a silently ignored setting. `where` prefixes messages.
void apply_json(const Json& j, TokenizerConfig& out, std::string_view where = "tokenizer");
void apply_json(const Json& j, AugmentConfig& out, std::string_view where = "augment");
void apply_json(const Json& j, EmbeddingProviderSpec& out, std::string_view where = "embedding");
void apply_json(const Json& j, ClassifierSpec& out, std::string_view where = "classifier");
void apply_json(const Json& j, TrainConfig& out, std::string_view where = "train");
void apply_json(const Json& j, SplitSpec& out, std::string_view where = "split");
void apply_json(const Json& j, SynthSpec& out, std::string_view where = "synthetic");
void apply_json(const Json& j, HybridConfig& out, std::string_view where = "hybrid");

Json to_json(const TokenizerConfig& c);
Json to_json(const AugmentConfig& c);
Json to_json(const EmbeddingProviderSpec& c);
Json to_json(const ClassifierSpec& c);
Json to_json(const TrainConfig& c);
Json to_json(const SplitSpec& c);
Json to_json(const SynthSpec& c);
Json to_json(const HybridConfig& c);

// Throws ValidationError naming the first key of `j` not in `allowed`.
void require_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                  std::string_view where);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

// 16 hex digits of FNV-1a over the bytes.
std::string content_digest(std::string_view bytes);

}  // namespace vte
