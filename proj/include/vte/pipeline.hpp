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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vte/augment.hpp"
#include "vte/classifier.hpp"
#include "vte/config.hpp"
#include "vte/corpus.hpp"
#include "vte/embed.hpp"
#include "vte/hybrid.hpp"
#include "vte/metrics.hpp"
#include "vte/tokenizer.hpp"

namespace vte {

inline constexpr std::string_view kVersion = "0.1.0";

// Relative output directories are resolved against this variable when set.
inline constexpr const char* kOutputRootEnv = "VTE_OUTPUT_ROOT";

struct RunConfig {
  // "pe" or "dvt" generate a synthetic corpus; "custom" reads corpus_path.
  std::string dataset = "pe";
  std::filesystem::path corpus_path;
  // Label scheme; implied by the preset, required for custom data.
  std::string scheme = "pe";
  SynthSpec synthetic;
  SplitSpec split;
  TokenizerConfig tokenizer = TokenizerConfig::pe();
  bool augment_enabled = true;
  AugmentConfig augment;
  // Empty selects the shipped clinical lexicon.
  std::filesystem::path lexicon_path;
  EmbeddingProviderSpec embedding;
  ClassifierSpec classifier;
  TrainConfig train;
  // PE only. Empty selects the shipped demonstration ruleset.
  std::optional<std::filesystem::path> ruleset_path;
  HybridConfig hybrid;
  std::filesystem::path output_dir = "vte-run";
  // Stage seeds (synthetic data, split, augmentation, training) derive from it.
  std::uint64_t seed = 0;

  // Throws ValidationError; in particular a DVT run may not name a ruleset.
  void validate() const;
  bool rules_enabled() const { return scheme == "pe"; }
  LabelScheme label_scheme() const { return LabelScheme::by_name(scheme); }

  // Defaults for a preset, before any file values are applied.
  static RunConfig preset(std::string_view dataset);
  // Starts from the preset named by "dataset" (default "pe") and overlays the
  // remaining keys. Unknown keys are rejected.
  static RunConfig from_json(const Json& j);
  Json to_json() const;
};

// Stage seeds after derivation from the global seed.
RunConfig resolve_seeds(RunConfig config);

std::filesystem::path resolve_output_dir(const std::filesystem::path& dir);

// Ordered stage names the config would execute.
std::vector<std::string> stage_plan(const RunConfig& config);

struct RunOutcome {
  Json manifest;
  std::filesystem::path output_dir;
  // "DL" always; "Rule" and "DL + Rule" for PE runs. Test split.
  std::vector<NamedReport> test_reports;
};

// Executes the plan and writes corpus.jsonl, augmented.jsonl, model.bin,
// history.csv, metrics.csv, metrics.txt, roc.csv, predictions.jsonl,
// config.json and manifest.json under the output directory. A stage failure
// throws StageError after writing a manifest marked incomplete. A lock file
// keeps a second run out of the same directory.
RunOutcome run_pipeline(const RunConfig& config);

}  // namespace vte
