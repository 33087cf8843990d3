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

#include <string_view>

#include "vte/classifier.hpp"
#include "vte/rules.hpp"

namespace vte {

struct HybridConfig {
  // The exception keeps a negative only when p(negative) is strictly above
  // this cutoff and the rule score is strictly below rule_score_cutoff.
  double negative_confidence_cutoff = 0.95;
  int rule_score_cutoff = 2;
  int negative_class = 0;

  void validate() const;
};

enum class HybridSource { kDl, kRuleOverride, kDlConfidentException };

std::string_view hybrid_source_name(HybridSource source);

struct HybridDecision {
  int final_class = 0;
  HybridSource source = HybridSource::kDl;
  Prediction dl_prediction;
  RuleVerdict rule_verdict;
};

// Binary only; throws UnsupportedSchemeError for any other class count.
HybridDecision combine(const Prediction& dl, const RuleVerdict& rule, const HybridConfig& config);

}  // namespace vte
