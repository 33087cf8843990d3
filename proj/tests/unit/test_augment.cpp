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

#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "vte/augment.hpp"
#include "vte/error.hpp"
#include "vte/rules.hpp"
#include "vte/tokenizer.hpp"

using namespace vte;
using vte::test::contains;

namespace {

AugmentConfig edit_config(double p, std::size_t aug_min, std::optional<std::size_t> aug_max) {
  AugmentConfig c;
  c.mode = AugmentMode::kSynonymReplacement;
  c.p_replace = p;
  c.aug_min = aug_min;
  c.aug_max = aug_max;
  return c;
}

std::vector<Report> minority_corpus() {
  SynthSpec spec;
  spec.n_reports = 120;
  spec.class_proportions = {0.7, 0.3};
  spec.seed = 21;
  return generate_synthetic(spec, LabelScheme::pe());
}

}  // namespace

TEST_CASE("target edit count") {
  CHECK(target_edit_count(200, edit_config(0.8, 30, 100)) == 100);
  CHECK(target_edit_count(200, edit_config(0.2, 30, std::nullopt)) == 40);
  CHECK(target_edit_count(10, edit_config(0.2, 30, std::nullopt)) == 30);
  CHECK(target_edit_count(0, edit_config(0.5, 1, std::nullopt)) == 1);
  // ceil, without floating-point overshoot on exact products.
  CHECK(target_edit_count(50, edit_config(0.2, 1, std::nullopt)) == 10);
  CHECK(target_edit_count(51, edit_config(0.2, 1, std::nullopt)) == 11);
}

TEST_CASE("synonym replacement") {
  Rng rng(1);
  SynonymLexicon lex;
  lex.add("large", {"big"});
  using V = std::vector<std::string>;
  SUBCASE("fixed position") {
    const auto e = replace_token_at({"large", "clot", "seen"}, 0, lex, rng);
    CHECK(e.outcome == EditOutcome::kEdited);
    CHECK(e.tokens == V{"big", "clot", "seen"});
    CHECK(replace_token_at({"Large"}, 0, lex, rng).tokens == V{"Big"});
  }
  SUBCASE("no lexicon entries leaves the sentence alone") {
    for (int i = 0; i < 20; ++i) {
      const auto e = synonym_replace_sentence({"clot", "seen", "."}, lex, rng);
      CHECK(e.outcome == EditOutcome::kNoCandidate);
      CHECK(e.tokens == V{"clot", "seen", "."});
    }
  }
  SUBCASE("every synonym is reachable") {
    SynonymLexicon three;
    three.add("small", {"tiny", "little", "minute"});
    three.add("acute", {"new", "recent"});
    three.add("seen", {"noted", "observed"});
    std::set<std::string> produced;
    const V sentence{"small", "acute", "clot", "seen"};
    for (int i = 0; i < 1000; ++i) {
      const auto e = synonym_replace_sentence(sentence, three, rng);
      REQUIRE(e.tokens.size() == sentence.size());
      for (std::size_t j = 0; j < sentence.size(); ++j) {
        if (e.tokens[j] != sentence[j]) produced.insert(e.tokens[j]);
      }
    }
    CHECK(produced == std::set<std::string>{"tiny", "little", "minute", "new", "recent", "noted", "observed"});
  }
  SUBCASE("gate zero never edits") {
    for (int i = 0; i < 50; ++i) CHECK(synonym_replace_sentence({"large"}, lex, rng, 0.0).outcome != EditOutcome::kEdited);
  }
}

TEST_CASE("random swapping") {
  Rng rng(2);
  using V = std::vector<std::string>;
  CHECK(random_swap_sentence({"a", "b"}, rng).tokens == V{"b", "a"});
  CHECK(random_swap_sentence({"a", "."}, rng).outcome == EditOutcome::kTooShort);
  CHECK(random_swap_sentence({}, rng).outcome == EditOutcome::kTooShort);
  const V input{"no", "acute", "clot", ",", "left", "lower", "lobe", "."};
  auto sorted_in = input;
  std::sort(sorted_in.begin(), sorted_in.end());
  for (int i = 0; i < 500; ++i) {
    Rng r(static_cast<std::uint64_t>(i));
    auto out = random_swap_sentence(input, r).tokens;
    CHECK(out[3] == ",");
    CHECK(out[7] == ".");
    CHECK(out != input);
    std::sort(out.begin(), out.end());
    CHECK(out == sorted_in);
  }
}

TEST_CASE("augment_text preserves token counts and multisets") {
  const SynonymLexicon lex = SynonymLexicon::demo_clinical();
  const auto reports = minority_corpus();
  for (int i = 0; i < 200; ++i) {
    const Report& r = reports[static_cast<std::size_t>(i) % reports.size()];
    Rng rng(static_cast<std::uint64_t>(1000 + i));
    AugmentConfig syn;
    std::size_t edits = 0;
    const std::string a = augment_text(r.text, syn, lex, rng, &edits);
    CHECK(word_tokenize(a, false).size() == word_tokenize(r.text, false).size());
    CHECK(split_sentences(a).size() == split_sentences(r.text).size());

    AugmentConfig swap;
    swap.mode = AugmentMode::kRandomSwapping;
    auto in = word_tokenize(r.text, false);
    auto out = word_tokenize(augment_text(r.text, swap, lex, rng, &edits), false);
    std::sort(in.begin(), in.end());
    std::sort(out.begin(), out.end());
    CHECK(in == out);
  }
}

TEST_CASE("augment_corpus") {
  const auto reports = minority_corpus();
  const SynonymLexicon lex = SynonymLexicon::demo_clinical();
  AugmentConfig cfg;
  cfg.seed = 77;
  SUBCASE("generates n minority reports") {
    const auto out = augment_corpus(reports, LabelScheme::pe(), cfg, lex);
    REQUIRE(out.size() == 200);
    std::set<std::string> ids;
    for (const Report& r : out) {
      CHECK(r.label == 1);
      CHECK(contains(r.id, "#aug"));
      CHECK(ids.insert(r.id).second);
    }
  }
  SUBCASE("n = 0") {
    cfg.n = 0;
    CHECK(augment_corpus(reports, LabelScheme::pe(), cfg, lex).empty());
  }
  SUBCASE("no minority members") {
    std::vector<Report> negatives;
    for (const Report& r : reports) if (r.label == 0) negatives.push_back(r);
    CHECK_THROWS_AS(augment_corpus(negatives, LabelScheme::pe(), cfg, lex), AugmentationError);
  }
  SUBCASE("deterministic") {
    cfg.n = 30;
    const auto a = augment_corpus(reports, LabelScheme::pe(), cfg, lex);
    const auto b = augment_corpus(reports, LabelScheme::pe(), cfg, lex);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].text == b[i].text);
  }
  SUBCASE("label-neutral synonyms leave rule scores unchanged") {
    SynonymLexicon neutral;
    neutral.add("small", {"tiny", "little"});
    neutral.add("seen", {"noted", "observed"});
    neutral.add("acute", {"recent"});
    neutral.add("lobe", {"region"});
    neutral.add("artery", {"vessel"});
    neutral.add("mild", {"slight"});
    neutral.add("the", {"this"});
    const RuleSet rules = RuleSet::demo_pe();
    cfg.n = 100;
    std::map<std::string, const Report*> by_id;
    for (const Report& r : reports) by_id[r.id] = &r;
    for (const Report& aug : augment_corpus(reports, LabelScheme::pe(), cfg, neutral)) {
      const Report& src = *by_id.at(aug.id.substr(0, aug.id.find("#aug")));
      CHECK(score_report(aug.text, rules).report_score == score_report(src.text, rules).report_score);
    }
  }
}

TEST_CASE("lexicon parsing") {
  std::istringstream tsv("# comment\nLarge\tbig|huge|large\nsmall\ttiny\n");
  const auto lex = SynonymLexicon::parse_tsv(tsv);
  CHECK(lex.size() == 2);
  REQUIRE(lex.lookup("LARGE") != nullptr);
  CHECK(*lex.lookup("large") == std::vector<std::string>{"big", "huge"});
  CHECK(lex.lookup("clot") == nullptr);

  std::istringstream bad("large big\n");
  CHECK_THROWS_AS(SynonymLexicon::parse_tsv(bad), ParseError);

  std::istringstream ppdb("[JJ] ||| large ||| big ||| 0.5\n[NP] ||| blood clot ||| thrombus ||| 0.3\n");
  const auto p = SynonymLexicon::parse_ppdb(ppdb);
  CHECK(p.size() == 1);
  CHECK(p.lookup("large") != nullptr);

  const auto demo = SynonymLexicon::demo_clinical();
  CHECK(demo.size() >= 20);
  for (const auto& [word, syns] : demo.entries()) {
    for (const std::string& s : syns) CHECK(word_tokenize(s, false).size() == 1);
  }
}

TEST_CASE("augment config validation") {
  AugmentConfig c;
  c.p_replace = 1.5;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = AugmentConfig{};
  c.aug_max = 10;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK(parse_augment_mode("swap") == AugmentMode::kRandomSwapping);
  CHECK_THROWS_AS(parse_augment_mode("backtranslate"), ValidationError);
}
