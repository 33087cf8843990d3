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

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "vte/error.hpp"
#include "vte/metrics.hpp"

using namespace vte;
using vte::test::contains;
using vte::oracle::recount_metrics;
using vte::oracle::wilcoxon_auc;


TEST_CASE("hand-computed binary example") {
  const std::vector<int> t{1, 1, 0, 0}, p{1, 0, 0, 0};
  const auto m = compute_metrics(t, p, 2);
  CHECK(m.accuracy == doctest::Approx(0.75));
  CHECK(m.sensitivity == doctest::Approx(0.75));
  // Per-class F1 0.6667 (class 0) and 0.8 ... weighted by equal support.
  CHECK(m.weighted_f1 == doctest::Approx((0.8 + 2.0 / 3.0) / 2).epsilon(1e-12));
  CHECK(m.weighted_f1 == doctest::Approx(0.7333333333));
  CHECK(m.confusion.at(1, 1) == 1);
  CHECK(m.confusion.at(1, 0) == 1);
  CHECK(m.confusion.at(0, 0) == 2);
}

TEST_CASE("perfect predictions score 1 everywhere") {
  const std::vector<int> t{0, 1, 2, 2, 1, 0, 0};
  const auto m = compute_metrics(t, t, 3);
  for (double v : {m.accuracy, m.sensitivity, m.specificity, m.weighted_precision, m.weighted_recall, m.weighted_f1}) {
    CHECK(v == doctest::Approx(1.0));
  }
}

TEST_CASE("single predicted class on balanced truths") {
  const std::vector<int> t{0, 0, 1, 1}, p{0, 0, 0, 0};
  const auto m = compute_metrics(t, p, 2);
  CHECK(m.accuracy == doctest::Approx(0.5));
  CHECK(m.specificity == doctest::Approx(0.5));
  CHECK(m.zero_prediction_classes == std::vector<int>{1});
}

TEST_CASE("metrics match brute-force recomputation") {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng.index(3));
    const std::size_t n = 1 + rng.index(30);
    std::vector<int> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<int>(rng.index(static_cast<std::size_t>(k)));
      p[i] = rng.bernoulli(0.6) ? t[i] : static_cast<int>(rng.index(static_cast<std::size_t>(k)));
    }
    const auto m = compute_metrics(t, p, k);
    const auto o = recount_metrics(t, p, k);
    CHECK(std::abs(m.accuracy - o.accuracy) <= 1e-12);
    CHECK(std::abs(m.sensitivity - o.sensitivity) <= 1e-12);
    CHECK(std::abs(m.specificity - o.specificity) <= 1e-12);
    CHECK(std::abs(m.weighted_precision - o.precision) <= 1e-12);
    CHECK(std::abs(m.weighted_recall - o.recall) <= 1e-12);
    CHECK(std::abs(m.weighted_f1 - o.f1) <= 1e-12);
    CHECK(std::abs(m.sensitivity - m.accuracy) <= 1e-12);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        long long count = 0;
        for (std::size_t i = 0; i < n; ++i) count += t[i] == a && p[i] == b;
        CHECK(m.confusion.at(a, b) == count);
      }
    }
  }
}

TEST_CASE("metrics ignore the order of reports") {
  Rng rng(3);
  std::vector<int> t(40), p(40);
  for (std::size_t i = 0; i < 40; ++i) {
    t[i] = static_cast<int>(rng.index(3));
    p[i] = static_cast<int>(rng.index(3));
  }
  const auto a = compute_metrics(t, p, 3);
  std::vector<std::size_t> idx(40);
  for (std::size_t i = 0; i < 40; ++i) idx[i] = i;
  rng.shuffle(idx.begin(), idx.end());
  std::vector<int> t2, p2;
  for (std::size_t i : idx) {
    t2.push_back(t[i]);
    p2.push_back(p[i]);
  }
  const auto b = compute_metrics(t2, p2, 3);
  CHECK(a.weighted_f1 == doctest::Approx(b.weighted_f1).epsilon(1e-14));
  CHECK(a.specificity == doctest::Approx(b.specificity).epsilon(1e-14));
}

TEST_CASE("input validation") {
  const std::vector<int> t{0, 1}, p{0};
  CHECK_THROWS_AS(compute_metrics(t, p, 2), MetricsError);
  const std::vector<int> e;
  CHECK_THROWS_AS(compute_metrics(e, e, 2), MetricsError);
  const std::vector<int> bad{0, 5};
  CHECK_THROWS_AS(compute_metrics(bad, bad, 2), MetricsError);
}

TEST_CASE("ROC curves") {
  SUBCASE("trapezoidal AUC equals the Wilcoxon pair statistic") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + rng.index(40);
      std::vector<int> t(n);
      std::vector<double> s(n);
      for (std::size_t i = 0; i < n; ++i) {
        t[i] = static_cast<int>(rng.index(2));
        // Coarse scores so ties occur.
        s[i] = (std::round(rng.uniform01() * 8.0) / 8.0 + 0.2 * t[i]) / 1.2;
      }
      t[0] = 0;
      t[1] = 1;
      const auto roc = roc_curve(t, s, 1);
      CHECK(std::abs(roc.auc - wilcoxon_auc(t, s, 1)) <= 1e-9);
      REQUIRE(roc.points.size() >= 2);
      CHECK(roc.points.front().fpr == 0.0);
      CHECK(roc.points.front().tpr == 0.0);
      CHECK(roc.points.back().fpr == 1.0);
      CHECK(roc.points.back().tpr == 1.0);
      for (std::size_t i = 1; i < roc.points.size(); ++i) {
        CHECK(roc.points[i].fpr >= roc.points[i - 1].fpr);
        CHECK(roc.points[i].tpr >= roc.points[i - 1].tpr);
      }
    }
  }
  SUBCASE("perfect and inverted rankings") {
    const std::vector<int> t{0, 0, 1, 1};
    CHECK(roc_curve(t, std::vector<double>{0.1, 0.2, 0.8, 0.9}, 1).auc == doctest::Approx(1.0));
    CHECK(roc_curve(t, std::vector<double>{0.9, 0.8, 0.2, 0.1}, 1).auc == doctest::Approx(0.0));
  }
  SUBCASE("attached per class") {
    const std::vector<int> t{0, 1, 2, 0};
    auto m = compute_metrics(t, t, 3);
    attach_roc(m, t, {{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}, {0.7, 0.2, 0.1}});
    CHECK(m.per_class_auc.size() == 3);
    CHECK(m.per_class_auc.at(2) == doctest::Approx(1.0));
  }
}

TEST_CASE("rendering") {
  const std::vector<int> t{1, 1, 0, 0}, p{1, 0, 0, 0};
  const std::vector<NamedReport> reports = {{"DL", compute_metrics(t, p, 2)}, {"DL + Rule", compute_metrics(t, t, 2)}};
  const std::string table = render_table(reports);
  CHECK(contains(table, "Specificity"));
  CHECK(contains(table, "0.750"));
  CHECK(contains(table, "DL + Rule"));

  const auto rows = parse_metrics_csv(render_csv(reports));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].first == "DL");
  CHECK(rows[0].second.size() == 6);
  CHECK(rows[0].second[0] == reports[0].second.accuracy);
  CHECK(rows[0].second[5] == reports[0].second.weighted_f1);
  CHECK(rows[1].second[2] == 1.0);

  CHECK(metric_value(reports[0].second, "weighted_f1") == reports[0].second.weighted_f1);
  CHECK(is_metric_name("specificity"));
  CHECK_FALSE(is_metric_name("auc"));
  CHECK_THROWS_AS(metric_value(reports[0].second, "auc"), MetricsError);
}
