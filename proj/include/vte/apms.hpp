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

#include <string>
#include <vector>

#include "vte/classifier.hpp"
#include "vte/config.hpp"
#include "vte/corpus.hpp"
#include "vte/embed.hpp"
#include "vte/metrics.hpp"
#include "vte/tokenizer.hpp"

namespace vte {

// One (embedding provider, classifier) pipeline competing in a selection run.
struct Candidate {
  std::string id;
  EmbeddingProviderSpec embedding;
  ClassifierSpec classifier;
  TrainConfig train_config;
};

struct MetricSuite {
  std::vector<std::string> metrics;
  // Empty means all ones.
  std::vector<double> weights;

  void validate() const;
  double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
};

struct CandidateScore {
  std::string id;
  bool failed = false;
  std::string failure;
  std::vector<double> values;  // validation metric values in suite order
  double sum = 0.0;            // weighted sum, -inf when failed
};

struct SelectionResult {
  std::string winner;
  std::size_t winner_index = 0;
  std::vector<CandidateScore> scores;
  MetricsReport winner_test_metrics;
  ModelParams winner_params;
  // Candidates whose models were run on the test split. Only ever the winner.
  std::vector<std::string> test_evaluated;
};

// Index of the highest sum; the earliest candidate wins ties. Throws
// SelectionError when every candidate failed.
std::size_t select_best(const std::vector<CandidateScore>& scores);

// Trains every candidate on the train split and scores it on validation.
// Training errors mark that candidate failed without stopping the sweep. The
// test split is embedded and evaluated for the winner alone, after selection.
SelectionResult run_selection(const std::vector<Candidate>& candidates,
                              const std::vector<Report>& corpus, const MetricSuite& suite,
                              const TokenizerConfig& tokenizer);

struct SelectionConfig {
  std::string scheme = "pe";
  TokenizerConfig tokenizer = TokenizerConfig::pe();
  MetricSuite suite;
  std::vector<Candidate> candidates;
};

// {"scheme", "tokenizer", "metrics", "weights", "candidates": [{"id",
// "embedding", "classifier", "train"}]}
SelectionConfig parse_selection_config(const Json& j);
Json selection_to_json(const SelectionResult& result, const MetricSuite& suite);
std::string render_leaderboard(const SelectionResult& result, const MetricSuite& suite);

}  // namespace vte
