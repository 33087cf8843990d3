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

#include "vte/rules.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "demo_assets.hpp"
#include "vte/error.hpp"
#include "vte/tokenizer.hpp"

namespace vte {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    std::string item = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::regex compile(const std::string& pattern, std::size_t rule_number) {
  try {
    return std::regex(pattern, std::regex::ECMAScript | std::regex::icase);
  } catch (const std::regex_error& e) {
    throw RuleLoadError("rule " + std::to_string(rule_number) + ": invalid pattern '" + pattern +
                            "': " + e.what(),
                        static_cast<int>(rule_number));
  }
}

}  // namespace

RuleSet::RuleSet(std::string name, int threshold) : name_(std::move(name)), threshold_(threshold) {}

void RuleSet::add(Rule rule) {
  const std::size_t number = rules_.size() + 1;
  if (rule.score < -1 || rule.score > 1) {
    throw ValidationError("rule " + std::to_string(number) + ": score " + std::to_string(rule.score) +
                          " is not one of -1, 0, 1");
  }
  if (rule.required_terms.empty()) {
    throw ValidationError("rule " + std::to_string(number) + ": needs at least one required term");
  }
  CompiledRule compiled;
  for (const std::string& p : rule.required_terms) compiled.required.push_back(compile(p, number));
  for (const std::string& p : rule.negation_terms) compiled.negations.push_back(compile(p, number));
  compiled.rule = std::move(rule);
  rules_.push_back(std::move(compiled));
}

RuleSet RuleSet::parse(std::istream& in) {
  RuleSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t number = set.rules_.size() + 1;
    if (t.rfind("name:", 0) == 0) {
      set.name_ = trim(t.substr(5));
      continue;
    }
    if (t.rfind("threshold:", 0) == 0) {
      try {
        set.threshold_ = std::stoi(trim(t.substr(10)));
      } catch (const std::exception&) {
        throw ParseError("ruleset line " + std::to_string(line_no) + ": bad threshold");
      }
      continue;
    }
    Rule rule;
    bool has_required = false, has_score = false;
    for (const std::string& field : split_on(t, ';')) {
      const auto colon = field.find(':');
      if (colon == std::string::npos) {
        throw RuleLoadError("rule " + std::to_string(number) + " (line " + std::to_string(line_no) +
                                "): field '" + field + "' lacks 'key:'",
                            static_cast<int>(number));
      }
      const std::string key = trim(field.substr(0, colon));
      const std::string value = trim(field.substr(colon + 1));
      if (key == "required") {
        rule.required_terms = split_on(value, '&');
        has_required = true;
      } else if (key == "score") {
        std::size_t used = 0;
        int score = 0;
        try {
          score = std::stoi(value, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != value.size()) {
          throw ValidationError("rule " + std::to_string(number) + ": score '" + value +
                                "' is not an integer");
        }
        rule.score = score;
        has_score = true;
      } else if (key == "negations") {
        rule.negation_terms = split_on(value, '|');
      } else {
        throw RuleLoadError("rule " + std::to_string(number) + ": unknown field '" + key + "'",
                            static_cast<int>(number));
      }
    }
    if (!has_required || !has_score) {
      throw RuleLoadError("rule " + std::to_string(number) + " needs 'required' and 'score' fields",
                          static_cast<int>(number));
    }
    set.add(std::move(rule));
  }
  if (set.rules_.empty()) throw ValidationError("ruleset contains no rules");
  return set;
}

RuleSet RuleSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ruleset " + path.string());
  return parse(in);
}

RuleSet RuleSet::demo_pe() {
  std::istringstream in{std::string(assets::kDemoPeRules)};
  return parse(in);
}

SentenceScore score_sentence(std::string_view sentence, const RuleSet& rules) {
  SentenceScore out;
  const std::string s(sentence);
  for (std::size_t i = 0; i < rules.rules().size(); ++i) {
    const CompiledRule& rule = rules.rules()[i];
    std::string matched;
    bool all = true;
    for (const std::regex& re : rule.required) {
      std::smatch m;
      if (!std::regex_search(s, m, re)) {
        all = false;
        break;
      }
      if (!matched.empty()) matched += " & ";
      matched += m.str();
    }
    if (!all) continue;
    RuleMatch match{i, std::move(matched), false, rule.rule.score};
    if (rule.rule.score > 0) {
      for (const std::regex& re : rule.negations) {
        if (std::regex_search(s, re)) {
          match.negated = true;
          match.contribution = 0;
          break;
        }
      }
    }
    out.score += match.contribution;
    out.matches.push_back(std::move(match));
  }
  return out;
}

RuleVerdict score_report(std::string_view text, const RuleSet& rules) {
  RuleVerdict v;
  v.sentences = split_sentences(text);
  for (const std::string& sentence : v.sentences) {
    SentenceScore s = score_sentence(sentence, rules);
    v.report_score += s.score;
    v.sentence_scores.push_back(s.score);
    v.matched_spans.push_back(std::move(s.matches));
  }
  v.positive = v.report_score > rules.threshold();
  return v;
}

}  // namespace vte
