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
#include <iosfwd>
#include <memory>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace vte {

// A keyword conjunction scored -1, 0 or 1. Every required pattern must occur
// in the same sentence. A negation pattern in that sentence voids a positive
// score; zero and negative scores are never voided. Patterns are
// case-insensitive ECMAScript regexes, so plain words act as substrings
// ("segmental" also hits "subsegmental").
struct Rule {
  std::vector<std::string> required_terms;
  int score = 1;
  std::vector<std::string> negation_terms;
};

struct CompiledRule {
  Rule rule;
  std::vector<std::regex> required;
  std::vector<std::regex> negations;
};

class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::string name, int threshold = 0);

  // Compiles and appends; throws ValidationError for a bad score or empty
  // conjunction and RuleLoadError for a pattern that does not compile. Rule
  // numbers in messages are 1-based.
  void add(Rule rule);

  const std::string& name() const { return name_; }
  int threshold() const { return threshold_; }
  void set_threshold(int t) { threshold_ = t; }
  const std::vector<CompiledRule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }

  // Line format, '#' comments:
  //   name: <text>
  //   threshold: <int>
  //   required: a & b; score: 1; negations: no|without
  static RuleSet parse(std::istream& in);
  static RuleSet load(const std::filesystem::path& path);
  // The shipped demonstration ruleset for chest CT angiography reports.
  static RuleSet demo_pe();

 private:
  std::string name_ = "rules";
  int threshold_ = 0;
  std::vector<CompiledRule> rules_;
};

struct RuleMatch {
  std::size_t rule_index = 0;  // 0-based position in the ruleset
  std::string matched_text;    // required-term hits joined with " & "
  bool negated = false;
  int contribution = 0;
};

struct SentenceScore {
  int score = 0;
  std::vector<RuleMatch> matches;
};

struct RuleVerdict {
  int report_score = 0;
  std::vector<std::string> sentences;
  std::vector<int> sentence_scores;
  std::vector<std::vector<RuleMatch>> matched_spans;
  bool positive = false;
};

// Each rule counts at most once per sentence.
SentenceScore score_sentence(std::string_view sentence, const RuleSet& rules);

// Sentence scores summed over tokenizer sentences; positive iff the total
// exceeds the ruleset threshold.
RuleVerdict score_report(std::string_view text, const RuleSet& rules);

}  // namespace vte
