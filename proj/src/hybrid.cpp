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

#include "vte/hybrid.hpp"


#include "vte/error.hpp"

namespace vte {

void HybridConfig::validate() const {
  if (!(negative_confidence_cutoff > 0.0 && negative_confidence_cutoff < 1.0)) {
    throw ValidationError("hybrid negative_confidence_cutoff must lie in (0,1)");
  }
  if (negative_class != 0 && negative_class != 1) {
    throw ValidationError("hybrid negative_class must be 0 or 1");
  }
}

std::string_view hybrid_source_name(HybridSource source) {
  switch (source) {
    case HybridSource::kDl:
      return "dl";
    case HybridSource::kRuleOverride:
      return "rule_override";
    case HybridSource::kDlConfidentException:
      return "dl_confident_exception";
  }
  return "dl";
}

HybridDecision combine(const Prediction& dl, const RuleVerdict& rule, const HybridConfig& config) {
  config.validate();
  if (dl.probabilities.size() != 2) {
    throw UnsupportedSchemeError("hybrid combination needs a 2-class prediction, got " +
                                 std::to_string(dl.probabilities.size()) + " classes");
  }
  const int negative = config.negative_class;
  const int positive = 1 - negative;
  HybridDecision d{dl.predicted_class, HybridSource::kDl, dl, rule};
  if (dl.predicted_class == negative && rule.positive) {
    const double p_negative = dl.probabilities[static_cast<std::size_t>(negative)];
    if (p_negative > config.negative_confidence_cutoff &&
        rule.report_score < config.rule_score_cutoff) {
      d.final_class = negative;
      d.source = HybridSource::kDlConfidentException;
    } else {
      d.final_class = positive;
      d.source = HybridSource::kRuleOverride;
    }
  }
  return d;
}

}  // namespace vte
