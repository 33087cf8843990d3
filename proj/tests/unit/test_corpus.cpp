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
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "vte/corpus.hpp"
#include "vte/error.hpp"
#include "vte/rules.hpp"

using namespace vte;
using vte::test::contains;
using vte::test::labelled;

namespace {

std::vector<Report> parse(const std::string& text, const LabelScheme& scheme = LabelScheme::pe()) {
  std::istringstream in(text);
  return parse_corpus(in, scheme);
}

std::map<Split, std::size_t> split_sizes(const std::vector<Report>& reports) {
  std::map<Split, std::size_t> sizes;
  for (const Report& r : reports) ++sizes[r.split.value()];
  return sizes;
}

}  // namespace

TEST_CASE("corpus parsing") {
  SUBCASE("two valid lines") {
    const auto r = parse(R"({"id":"a","text":"No PE.","label":0}
{"id":"b","text":"Line one\nline two","label":1,"split":"test"})");
    REQUIRE(r.size() == 2);
    CHECK(r[1].text == "Line one\nline two");
    CHECK(r[1].split == Split::kTest);
    CHECK(r[0].split == std::nullopt);
  }
  SUBCASE("label outside the scheme names the report") {
    try {
      parse(R"({"id":"bad-7","text":"x","label":3})");
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(contains(e.what(), "bad-7"));
    }
  }
  SUBCASE("duplicate id") {
    try {
      parse("{\"id\":\"r1\",\"text\":\"x\"}\n{\"id\":\"r1\",\"text\":\"y\"}\n");
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(contains(e.what(), "duplicate"));
      CHECK(contains(e.what(), "r1"));
    }
  }
  SUBCASE("malformed line reports its line number") {
    try {
      parse("{\"id\":\"a\",\"text\":\"x\"}\n{not json\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(contains(e.what(), "line 2"));
    }
  }
  SUBCASE("blank text rejected") {
    CHECK_THROWS_AS(parse(R"({"id":"a","text":"   "})"), ValidationError);
  }
  SUBCASE("unlabelled records are allowed") {
    CHECK(parse(R"({"id":"a","text":"x"})").front().label == std::nullopt);
  }
}

TEST_CASE("corpus write then parse round-trips") {
  auto reports = labelled({0, 1, 0});
  reports[1].text = "Quote \" and\nnewline\ttab é";
  reports[2].split = Split::kValidation;
  std::ostringstream os;
  write_corpus(os, reports);
  const auto back = parse(os.str());
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].id == reports[i].id);
    CHECK(back[i].text == reports[i].text);
    CHECK(back[i].label == reports[i].label);
    CHECK(back[i].split == reports[i].split);
  }
}

TEST_CASE("apportion uses largest remainders") {
  CHECK(apportion(100, {0.88, 0.12}) == std::vector<std::size_t>{88, 12});
  CHECK(apportion(10, {1.0 / 3, 1.0 / 3, 1.0 / 3}) == std::vector<std::size_t>{4, 3, 3});
  CHECK(apportion(7, {0.5, 0.5}) == std::vector<std::size_t>{4, 3});
  CHECK(apportion(0, {0.3, 0.7}) == std::vector<std::size_t>{0, 0});
}

TEST_CASE("split sizes follow the rounding rule") {
  SplitSpec spec;
  spec.seed = 3;
  SUBCASE("100 reports -> 72/8/20") {
    std::vector<int> labels(100, 0);
    std::fill(labels.begin(), labels.begin() + 12, 1);
    auto sizes = split_sizes(split_corpus(labelled(labels), spec));
    CHECK(sizes[Split::kTrain] == 72);
    CHECK(sizes[Split::kValidation] == 8);
    CHECK(sizes[Split::kTest] == 20);
  }
  SUBCASE("ten reports of one class -> 7/1/2") {
    // test = round(0.2 * 10) = 2; validation = round(0.1 * 8) = 1.
    const auto out = split_corpus(labelled(std::vector<int>(10, 1)), spec);
    auto sizes = split_sizes(out);
    CHECK(sizes[Split::kTrain] == 7);
    CHECK(sizes[Split::kValidation] == 1);
    CHECK(sizes[Split::kTest] == 2);
    for (const Report& r : out) CHECK(r.label == 1);
  }
  SUBCASE("unstratified uses the same sizes") {
    spec.stratified = false;
    auto sizes = split_sizes(split_corpus(labelled(std::vector<int>(100, 0)), spec));
    CHECK(sizes[Split::kTest] == 20);
    CHECK(sizes[Split::kValidation] == 8);
  }
}

TEST_CASE("split is deterministic and independent of input order") {
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) labels.push_back(i % 5 == 0 ? 1 : 0);
  SplitSpec spec;
  spec.seed = 99;
  const auto a = split_corpus(labelled(labels), spec);
  auto shuffled = labelled(labels);
  std::reverse(shuffled.begin(), shuffled.end());
  const auto b = split_corpus(shuffled, spec);
  std::map<std::string, Split> by_id;
  for (const Report& r : a) by_id[r.id] = *r.split;
  for (const Report& r : b) CHECK(by_id.at(r.id) == *r.split);
  spec.seed = 100;
  const auto c = split_corpus(labelled(labels), spec);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) any_diff = any_diff || a[i].split != c[i].split;
  CHECK(any_diff);
}

TEST_CASE("stratified split keeps class fractions within one sample") {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 30 + rng.index(200);
    const int k = 2 + static_cast<int>(rng.index(2));
    std::vector<int> labels;
    for (int c = 0; c < k; ++c) labels.insert(labels.end(), 3, c);  // each class >= 3
    while (labels.size() < n) labels.push_back(rng.bernoulli(0.8) ? 0 : 1 + static_cast<int>(rng.index(k - 1)));
    SplitSpec spec;
    spec.seed = rng.next_u64();
    spec.test_fraction = rng.uniform(0.1, 0.4);
    spec.validation_fraction_of_train = rng.uniform(0.05, 0.3);
    const auto out = split_corpus(labelled(labels), spec);
    REQUIRE(out.size() == labels.size());
    auto sizes = split_sizes(out);
    std::size_t total = 0;
    for (const auto& [s, count] : sizes) total += count;
    CHECK(total == labels.size());  // partition
    for (Split s : {Split::kTrain, Split::kValidation, Split::kTest}) {
      const double frac = static_cast<double>(sizes[s]) / static_cast<double>(n);
      for (int c = 0; c < k; ++c) {
        const auto in_class = std::count(labels.begin(), labels.end(), c);
        const auto in_split = std::count_if(out.begin(), out.end(), [&](const Report& r) {
          return r.split == s && r.label == c;
        });
        CHECK(std::abs(static_cast<double>(in_split) - frac * static_cast<double>(in_class)) <= 1.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("stratification refuses classes with fewer than three members") {
  CHECK_THROWS_AS(split_corpus(labelled({0, 0, 0, 0, 1, 1}), SplitSpec{}), StratificationError);
  SplitSpec loose;
  loose.stratified = false;
  CHECK_NOTHROW(split_corpus(labelled({0, 0, 0, 0, 1, 1}), loose));
}

TEST_CASE("split spec validation") {
  SplitSpec s;
  s.test_fraction = 0.0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.test_fraction = 0.2;
  s.validation_fraction_of_train = 1.0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("synthetic corpus") {
  SynthSpec spec;
  spec.n_reports = 100;
  spec.seed = 7;
  const auto reports = generate_synthetic(spec, LabelScheme::pe());
  REQUIRE(reports.size() == 100);
  CHECK(std::count_if(reports.begin(), reports.end(), [](const Report& r) { return r.label == 0; }) == 88);
  CHECK(std::count_if(reports.begin(), reports.end(), [](const Report& r) { return r.label == 1; }) == 12);

  SUBCASE("byte-identical for the same spec") {
    std::ostringstream a, b;
    write_corpus(a, reports);
    write_corpus(b, generate_synthetic(spec, LabelScheme::pe()));
    CHECK(a.str() == b.str());
  }
  SUBCASE("ids unique and texts non-empty") {
    std::set<std::string> ids;
    for (const Report& r : reports) {
      CHECK(ids.insert(r.id).second);
      CHECK_FALSE(r.text.empty());
    }
  }
  SUBCASE("positives carry an un-negated finding, negatives none") {
    // The shipped rule matcher is the checker: a positive report scores > 0,
    // a negative one never does.
    const RuleSet rules = RuleSet::demo_pe();
    SynthSpec big = spec;
    big.n_reports = 400;
    big.class_proportions = {0.5, 0.5};
    for (const Report& r : generate_synthetic(big, LabelScheme::pe())) {
      const int score = score_report(r.text, rules).report_score;
      if (r.label == 1) {
        CHECK(score > 0);
      } else {
        CHECK(score <= 0);
      }
    }
  }
  SUBCASE("three-class ultrasound corpus") {
    SynthSpec dvt;
    dvt.n_reports = 50;
    dvt.class_proportions = {0.8, 0.1, 0.1};
    const auto d = generate_synthetic(dvt, LabelScheme::dvt());
    CHECK(d.size() == 50);
    CHECK(std::count_if(d.begin(), d.end(), [](const Report& r) { return r.label == 2; }) == 5);
  }
  SUBCASE("spec validation") {
    SynthSpec bad = spec;
    bad.n_reports = 0;
    CHECK_THROWS_AS(generate_synthetic(bad, LabelScheme::pe()), ValidationError);
    bad = spec;
    bad.class_proportions = {0.5, 0.4};
    CHECK_THROWS_AS(generate_synthetic(bad, LabelScheme::pe()), ValidationError);
  }
}

TEST_CASE("label schemes") {
  CHECK(LabelScheme::pe().num_classes() == 2);
  CHECK(LabelScheme::pe().minority_class == 1);
  CHECK(LabelScheme::dvt().num_classes() == 3);
  CHECK_THROWS_AS(LabelScheme::by_name("nope"), ValidationError);
  CHECK(parse_split("val") == Split::kValidation);
  CHECK_THROWS_AS(parse_split("dev"), ParseError);
}
