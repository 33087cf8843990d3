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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vte/apms.hpp"
#include "vte/augment.hpp"
#include "vte/classifier.hpp"
#include "vte/config.hpp"
#include "vte/corpus.hpp"
#include "vte/hybrid.hpp"
#include "vte/metrics.hpp"
#include "vte/pipeline.hpp"
#include "vte/rules.hpp"
#include "vte/tokenizer.hpp"

namespace fs = std::filesystem;
using namespace vte;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vte-acceptance-" + name);
  fs::remove_all(dir);
  return dir;
}

EmbeddingMatrix random_input(std::size_t rows, std::size_t dim, Rng& rng) {
  EmbeddingMatrix m(rows, dim);
  for (float& v : m.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return m;
}

// 1. Analytic gradients against central differences.
Outcome gradient_check() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::size_t coords = 0;
  Rng rng(2024);
  for (ClassifierKind kind : {ClassifierKind::kBiLstm, ClassifierKind::kLstm, ClassifierKind::kLinear}) {
    ClassifierSpec spec;
    spec.kind = kind;
    spec.input_dim = 8;
    spec.hidden_size = 4;
    spec.num_layers = 2;
    spec.num_classes = 3;
    ModelParams p = init_params(spec, 99);
    std::vector<EmbeddingMatrix> xs;
    for (int i = 0; i < 3; ++i) xs.push_back(random_input(5, 8, rng));
    const std::vector<Example> batch = {{&xs[0], 0}, {&xs[1], 1}, {&xs[2], 2}};
    const ModelParams g = gradient(p, batch).gradient;
    const double eps = 1e-5;
    for (std::size_t t = 0; t < p.tensors.size(); ++t) {
      for (std::size_t i = 0; i < p.tensors[t].values.size(); ++i) {
        double& w = p.tensors[t].values[i];
        const double saved = w;
        w = saved + eps;
        const double up = loss(p, batch);
        w = saved - eps;
        const double down = loss(p, batch);
        w = saved;
        const double numeric = (up - down) / (2 * eps);
        const double analytic = g.tensors[t].values[i];
        const double scale = std::max(std::abs(numeric), std::abs(analytic));
        const double err = scale < 1e-7 ? (std::abs(numeric - analytic) < 1e-9 ? 0.0 : 1.0)
                                        : std::abs(numeric - analytic) / scale;
        worst = std::max(worst, err);
        ++coords;
      }
    }
  }
  const double secs = seconds_since(start);
  return {worst < 1e-3 && secs < 10.0, std::to_string(coords) + " coordinates, max relative error " +
                                           fmt(worst, 8) + ", " + fmt(secs, 2) + " s"};
}

// 2. Bi-LSTM forward against the gate-equation oracle.
Outcome forward_oracle() {
  ClassifierSpec spec;
  spec.kind = ClassifierKind::kBiLstm;
  spec.input_dim = 3;
  spec.hidden_size = 2;
  spec.num_layers = 1;
  spec.num_classes = 2;
  ModelParams p = zero_params(spec);
  int counter = 0;
  for (Tensor& t : p.tensors) {
    for (double& v : t.values) v = 0.1 * static_cast<double>((counter++ % 7) - 3);
  }
  EmbeddingMatrix x(2, 3);
  x.data = {0.5f, -1.0f, 0.25f, 1.0f, 0.0f, -0.5f};
  const auto got = forward(p, x).probabilities;
  const auto want = oracle::oracle_probabilities(p, x);
  double diff = 0.0;
  for (std::size_t c = 0; c < got.size(); ++c) diff = std::max(diff, std::abs(got[c] - want[c]));
  return {diff <= 1e-9, "max |difference| " + fmt(diff, 15)};
}

// 3. Rule engine against a brute-force oracle.
Outcome rule_oracle() {
  RuleSet segmental_rule;
  segmental_rule.add({{"segmental", "filling"}, 1, {"no", "negative", "without", "question", "unchanged"}});
  const int example_hit = score_sentence("small filling defect within the subsegmental branch", segmental_rule).score;
  const int example_negated = score_sentence("No filling defect in the segmental arteries", segmental_rule).score;

  SynthSpec spec;
  spec.n_reports = 200;
  spec.class_proportions = {0.6, 0.4};
  spec.seed = 3;
  const RuleSet demo = RuleSet::demo_pe();
  const auto rules = oracle::raw_rules(demo);
  int mismatches = 0;
  for (const Report& r : generate_synthetic(spec, LabelScheme::pe())) {
    const RuleVerdict v = score_report(r.text, demo);
    const int want = oracle::brute_force_score(r.text, rules);
    if (v.report_score != want || v.positive != (want > 0)) ++mismatches;
  }
  return {mismatches == 0 && example_hit == 1 && example_negated == 0,
          std::to_string(mismatches) + " mismatches over 200 reports; examples scored " +
              std::to_string(example_hit) + " and " + std::to_string(example_negated)};
}

// 4. Hybrid combiner over the full grid.
Outcome hybrid_grid() {
  int agree = 0, cells = 0;
  for (int dl_class : {0, 1}) {
    for (double p_neg : {0.90, 0.951}) {
      for (int score : {0, 1, 2}) {
        Prediction dl;
        dl.predicted_class = dl_class;
        dl.probabilities = {p_neg, 1.0 - p_neg};
        RuleVerdict rule;
        rule.report_score = score;
        rule.positive = score > 0;
        int expected = dl_class;
        if (dl_class == 0 && score > 0) expected = (p_neg > 0.95 && score < 2) ? 0 : 1;
        agree += combine(dl, rule, HybridConfig{}).final_class == expected;
        ++cells;
      }
    }
  }
  return {agree == cells && cells == 12, std::to_string(agree) + "/" + std::to_string(cells) + " cells agree"};
}

// 5. Augmentation invariants.
Outcome augmentation_invariants() {
  AugmentConfig a;
  a.p_replace = 0.8;
  a.aug_min = 30;
  a.aug_max = 100;
  AugmentConfig b;
  b.mode = AugmentMode::kRandomSwapping;
  b.p_swap = 0.2;
  b.aug_min = 30;
  const std::size_t e1 = target_edit_count(200, a);
  const std::size_t e2 = target_edit_count(200, b);
  const std::size_t e3 = target_edit_count(10, b);
  const bool examples = e1 == 100 && e2 == 40 && e3 == 30;

  SynthSpec spec;
  spec.n_reports = 400;
  spec.seed = 8;
  const auto corpus = generate_synthetic(spec, LabelScheme::pe());
  std::map<std::string, const Report*> by_id;
  for (const Report& r : corpus) by_id[r.id] = &r;
  const SynonymLexicon lexicon = SynonymLexicon::demo_clinical();

  int count_violations = 0, multiset_violations = 0, label_violations = 0;
  AugmentConfig syn;
  syn.n = 1000;
  syn.seed = 1;
  for (const Report& out : augment_corpus(corpus, LabelScheme::pe(), syn, lexicon)) {
    const Report& src = *by_id.at(out.id.substr(0, out.id.find("#aug")));
    count_violations += word_tokenize(out.text, false).size() != word_tokenize(src.text, false).size();
    label_violations += out.label != 1;
  }
  AugmentConfig swap;
  swap.mode = AugmentMode::kRandomSwapping;
  swap.n = 1000;
  swap.seed = 2;
  for (const Report& out : augment_corpus(corpus, LabelScheme::pe(), swap, lexicon)) {
    const Report& src = *by_id.at(out.id.substr(0, out.id.find("#aug")));
    auto x = word_tokenize(out.text, false);
    auto y = word_tokenize(src.text, false);
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    multiset_violations += x != y;
    label_violations += out.label != 1;
  }
  const bool ok = examples && count_violations == 0 && multiset_violations == 0 && label_violations == 0;
  return {ok, "edit counts " + std::to_string(e1) + "/" + std::to_string(e2) + "/" + std::to_string(e3) +
                  "; violations: token count " + std::to_string(count_violations) + ", multiset " +
                  std::to_string(multiset_violations) + ", label " + std::to_string(label_violations)};
}

// 6. Metrics against recounted confusion values and the Wilcoxon statistic.
Outcome metrics_oracle() {
  Rng rng(77);
  int bad_cases = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const int k = 2 + static_cast<int>(rng.index(2));
    const std::size_t n = 4 + rng.index(20);
    std::vector<int> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<int>(rng.index(static_cast<std::size_t>(k)));
      p[i] = rng.bernoulli(0.6) ? t[i] : static_cast<int>(rng.index(static_cast<std::size_t>(k)));
    }
    const auto m = compute_metrics(t, p, k);
    const auto o = oracle::recount_metrics(t, p, k);
    const double d = std::max({std::abs(m.accuracy - o.accuracy), std::abs(m.sensitivity - o.sensitivity),
                               std::abs(m.specificity - o.specificity),
                               std::abs(m.weighted_precision - o.precision),
                               std::abs(m.weighted_recall - o.recall), std::abs(m.weighted_f1 - o.f1)});
    bad_cases += d > 1e-12;
  }
  double worst_auc = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng.index(50);
    std::vector<int> t(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<int>(rng.index(2));
      s[i] = std::round(rng.uniform01() * 20.0) / 20.0;
    }
    t[0] = 0;
    t[1] = 1;
    worst_auc = std::max(worst_auc, std::abs(roc_curve(t, s, 1).auc - oracle::wilcoxon_auc(t, s, 1)));
  }
  return {bad_cases == 0 && worst_auc <= 1e-9,
          std::to_string(bad_cases) + "/25 metric mismatches; max AUC difference " + fmt(worst_auc, 12)};
}

const MetricsReport* find_report(const RunOutcome& o, const std::string& name) {
  for (const auto& [n, r] : o.test_reports) {
    if (n == name) return &r;
  }
  return nullptr;
}

// 7. Desk-scale PE pipeline.
Outcome desk_pipeline() {
  const auto start = Clock::now();
  RunConfig cfg = RunConfig::from_json(read_json_file(fs::path(VTE_SOURCE_DIR) / "configs" / "pe_desk.json"));
  cfg.output_dir = scratch("desk");
  const RunOutcome o = run_pipeline(cfg);
  const double secs = seconds_since(start);
  const MetricsReport* dl = find_report(o, "DL");
  const MetricsReport* hybrid = find_report(o, "DL + Rule");
  if (dl == nullptr || hybrid == nullptr) return {false, "missing DL or hybrid report"};
  const bool ok = cfg.synthetic.n_reports == 900 && cfg.embedding.kind == EmbeddingKind::kHashed &&
                  cfg.classifier.kind == ClassifierKind::kBiLstm && dl->accuracy >= 0.90 &&
                  hybrid->specificity > dl->specificity && secs < 300.0;
  fs::remove_all(cfg.output_dir);
  return {ok, "DL accuracy " + fmt(dl->accuracy) + ", specificity " + fmt(dl->specificity) +
                  " -> hybrid " + fmt(hybrid->specificity) + " (hybrid accuracy " + fmt(hybrid->accuracy) +
                  "), " + fmt(secs, 1) + " s"};
}

// 8. Model selection sweep.
Outcome selection_sweep() {
  SynthSpec spec;
  spec.n_reports = 300;
  spec.class_proportions = {0.7, 0.3};
  spec.seed = 31;
  SplitSpec split;
  split.seed = 32;
  const auto corpus = split_corpus(generate_synthetic(spec, LabelScheme::pe()), split);

  auto make = [](std::string id, EmbeddingKind emb, ClassifierKind model) {
    Candidate c;
    c.id = std::move(id);
    c.embedding.kind = emb;
    c.embedding.dim = 64;
    c.classifier.kind = model;
    c.classifier.input_dim = 64;
    c.classifier.hidden_size = 16;
    c.classifier.num_layers = 1;
    c.train_config.epochs = 15;
    c.train_config.batch_size = 8;
    c.train_config.learning_rate = 0.1;
    c.train_config.seed = 5;
    return c;
  };
  const std::vector<Candidate> candidates = {
      make("hashed-bilstm", EmbeddingKind::kHashed, ClassifierKind::kBiLstm),
      make("hashed-linear", EmbeddingKind::kHashed, ClassifierKind::kLinear),
      make("constant-bilstm", EmbeddingKind::kConstant, ClassifierKind::kBiLstm),
  };
  const MetricSuite suite{{"accuracy", "specificity", "weighted_f1"}, {}};
  TokenizerConfig tok = TokenizerConfig::pe();

  const SelectionResult first = run_selection(candidates, corpus, suite, tok);
  const SelectionResult second = run_selection(candidates, corpus, suite, tok);

  // Independent argmax over the recomputed sums, earliest wins.
  std::size_t expect = 0;
  double best = -std::numeric_limits<double>::infinity();
  bool sums_ok = true;
  for (std::size_t i = 0; i < first.scores.size(); ++i) {
    double sum = 0.0;
    for (double v : first.scores[i].values) sum += v;
    sums_ok = sums_ok && std::abs(sum - first.scores[i].sum) <= 1e-12;
    if (!first.scores[i].failed && sum > best) {
      best = sum;
      expect = i;
    }
  }

  // Flipping every test label must leave the selection untouched.
  auto flipped = corpus;
  for (Report& r : flipped) {
    if (r.split == Split::kTest) r.label = 1 - *r.label;
  }
  const SelectionResult blind = run_selection(candidates, flipped, suite, tok);
  bool same_scores = first.scores.size() == second.scores.size() && first.scores.size() == blind.scores.size();
  for (std::size_t i = 0; same_scores && i < first.scores.size(); ++i) {
    same_scores = first.scores[i].sum == second.scores[i].sum && first.scores[i].sum == blind.scores[i].sum;
  }
  // The collapsed embedding cannot see which keywords occur, so it must lose.
  const bool baseline_loses = first.scores[0].sum > first.scores[2].sum;
  const bool ok = sums_ok && baseline_loses && first.winner_index == expect && same_scores && first.winner == second.winner &&
                  first.winner == blind.winner && first.winner_params == second.winner_params &&
                  first.test_evaluated == std::vector<std::string>{first.winner};
  std::string detail = "winner " + first.winner + " (";
  for (std::size_t i = 0; i < first.scores.size(); ++i) {
    detail += (i ? ", " : "") + first.scores[i].id + " " + fmt(first.scores[i].sum, 3);
  }
  return {ok, detail + "); deterministic " + (same_scores ? "yes" : "no")};
}

int run_command(const std::string& cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 9. Two CLI runs with the same seed produce identical model and metric files.
Outcome cli_determinism() {
  const fs::path root = scratch("determinism");
  fs::create_directories(root);
  const std::string config = (root / "run.json").string();
  write_text_file(config, R"({"dataset":"pe","seed":5,
    "synthetic":{"n_reports":300},
    "augment":{"n":30},
    "embedding":{"kind":"hashed","dim":32},
    "classifier":{"kind":"bilstm","input_dim":32,"hidden_size":8,"num_layers":1},
    "train":{"epochs":2,"batch_size":8}})");
  const std::string cli = VTE_CLI_PATH;
  const int c1 = run_command(cli + " pipeline run --config " + config + " --out " + (root / "a").string());
  const int c2 = run_command(cli + " pipeline run --config " + config + " --out " + (root / "b").string());
  if (c1 != 0 || c2 != 0) return {false, "pipeline exited with " + std::to_string(c1) + "/" + std::to_string(c2)};
  bool same = true;
  std::string detail;
  for (const char* f : {"model.bin", "metrics.csv", "roc.csv"}) {
    const std::string a = read_text_file(root / "a" / f);
    const std::string b = read_text_file(root / "b" / f);
    same = same && a == b && !a.empty();
    detail += std::string(detail.empty() ? "" : ", ") + f + " " + content_digest(a) + (a == b ? " =" : " !=");
  }
  fs::remove_all(root);
  return {same, detail};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional criterion numbers restrict the run, e.g. "vte_acceptance 7 9".
  std::vector<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.push_back(static_cast<std::size_t>(std::stoul(argv[i])));
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient check (bilstm, lstm, linear)", gradient_check},
      {"Bi-LSTM forward oracle", forward_oracle},
      {"rule engine oracle", rule_oracle},
      {"hybrid truth table", hybrid_grid},
      {"augmentation invariants", augmentation_invariants},
      {"metrics oracle", metrics_oracle},
      {"desk-scale PE pipeline", desk_pipeline},
      {"model selection sweep", selection_sweep},
      {"pipeline determinism", cli_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && std::find(only.begin(), only.end(), i + 1) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first
              << " -- " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
  return failures == 0 ? 0 : 1;
}
