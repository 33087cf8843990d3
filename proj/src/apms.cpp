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

#include "vte/apms.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "vte/error.hpp"

namespace vte {
namespace {

std::vector<Example> examples_for(const std::vector<EmbeddingMatrix>& xs,
                                  const std::vector<Report>& reports) {
  std::vector<Example> out;
  out.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out.push_back({&xs[i], reports[i].label.value()});
  return out;
}

void check_candidates(const std::vector<Candidate>& candidates) {
  if (candidates.empty()) throw SelectionError("selection needs at least one candidate");
  std::set<std::string> ids;
  for (const Candidate& c : candidates) {
    if (c.id.empty()) throw ValidationError("candidate id must not be empty");
    if (!ids.insert(c.id).second) throw ValidationError("duplicate candidate id '" + c.id + "'");
    c.embedding.validate();
    c.classifier.validate();
    c.train_config.validate();
    if (c.embedding.dim != c.classifier.input_dim) {
      throw ValidationError("candidate '" + c.id + "': embedding dim " +
                            std::to_string(c.embedding.dim) + " != classifier input_dim " +
                            std::to_string(c.classifier.input_dim));
    }
  }
}

}  // namespace

void MetricSuite::validate() const {
  if (metrics.empty()) throw ValidationError("metric suite is empty");
  std::set<std::string> seen;
  for (const std::string& m : metrics) {
    if (!is_metric_name(m)) throw ValidationError("unknown metric '" + m + "'");
    if (!seen.insert(m).second) throw ValidationError("metric '" + m + "' listed twice");
  }
  if (!weights.empty() && weights.size() != metrics.size()) {
    throw ValidationError("metric weights must match the metric list in length");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw ValidationError("metric weights must be finite");
  }
}

std::size_t select_best(const std::vector<CandidateScore>& scores) {
  std::size_t best = scores.size();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].failed) continue;
    if (best == scores.size() || scores[i].sum > scores[best].sum) best = i;
  }
  if (best == scores.size()) throw SelectionError("every candidate failed");
  return best;
}

SelectionResult run_selection(const std::vector<Candidate>& candidates,
                              const std::vector<Report>& corpus, const MetricSuite& suite,
                              const TokenizerConfig& tokenizer) {
  suite.validate();
  check_candidates(candidates);
  const std::vector<Report> train_reports = filter_split(corpus, Split::kTrain);
  const std::vector<Report> val_reports = filter_split(corpus, Split::kValidation);
  if (train_reports.empty() || val_reports.empty() || filter_split(corpus, Split::kTest).empty()) {
    throw SelectionError("selection needs populated train, validation and test splits");
  }
  for (const Report& r : corpus) {
    if (!r.label) throw ValidationError("report '" + r.id + "' has no label");
  }

  SelectionResult result;
  std::vector<ModelParams> trained(candidates.size());
  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    const Candidate& c = candidates[ci];
    CandidateScore score;
    score.id = c.id;
    try {
      const auto provider = make_provider(c.embedding);
      const auto train_x = embed_reports(train_reports, tokenizer, *provider);
      const auto val_x = embed_reports(val_reports, tokenizer, *provider);
      const auto train_set = examples_for(train_x, train_reports);
      const auto val_set = examples_for(val_x, val_reports);
      TrainResult tr = train(c.classifier, train_set, val_set, c.train_config);
      if (!tr.params.all_finite()) throw TrainingError("non-finite parameters", -1);
      const Evaluation ev = evaluate(tr.params, val_set);
      for (std::size_t m = 0; m < suite.metrics.size(); ++m) {
        const double v = metric_value(ev.metrics, suite.metrics[m]);
        score.values.push_back(v);
        score.sum += suite.weight(m) * v;
      }
      trained[ci] = std::move(tr.params);
    } catch (const Error& e) {
      score.failed = true;
      score.failure = e.what();
      score.values.clear();
      score.sum = -std::numeric_limits<double>::infinity();
    }
    result.scores.push_back(std::move(score));
  }

  result.winner_index = select_best(result.scores);
  const Candidate& winner = candidates[result.winner_index];
  result.winner = winner.id;
  result.winner_params = std::move(trained[result.winner_index]);

  const std::vector<Report> test_reports = filter_split(corpus, Split::kTest);
  const auto provider = make_provider(winner.embedding);
  const auto test_x = embed_reports(test_reports, tokenizer, *provider);
  result.winner_test_metrics = evaluate(result.winner_params, examples_for(test_x, test_reports)).metrics;
  result.test_evaluated.push_back(winner.id);
  return result;
}

SelectionConfig parse_selection_config(const Json& j) {
  require_keys(j, {"scheme", "tokenizer", "metrics", "weights", "candidates"}, "selection");
  SelectionConfig cfg;
  if (j.contains("scheme")) cfg.scheme = j.at("scheme").get<std::string>();
  const LabelScheme scheme = LabelScheme::by_name(cfg.scheme);
  cfg.tokenizer = TokenizerConfig::by_preset(cfg.scheme);
  if (j.contains("tokenizer")) apply_json(j.at("tokenizer"), cfg.tokenizer);
  if (!j.contains("metrics")) throw ValidationError("selection config needs 'metrics'");
  cfg.suite.metrics = j.at("metrics").get<std::vector<std::string>>();
  if (j.contains("weights")) cfg.suite.weights = j.at("weights").get<std::vector<double>>();
  cfg.suite.validate();
  if (!j.contains("candidates") || !j.at("candidates").is_array()) {
    throw ValidationError("selection config needs a 'candidates' array");
  }
  std::size_t index = 0;
  for (const Json& cj : j.at("candidates")) {
    const std::string where = "candidates[" + std::to_string(index++) + "]";
    require_keys(cj, {"id", "embedding", "classifier", "train"}, where);
    Candidate c;
    if (!cj.contains("id")) throw ValidationError(where + " needs an 'id'");
    c.id = cj.at("id").get<std::string>();
    c.classifier.num_classes = static_cast<std::size_t>(scheme.num_classes());
    if (cj.contains("embedding")) apply_json(cj.at("embedding"), c.embedding, where + ".embedding");
    c.classifier.input_dim = c.embedding.dim;
    if (cj.contains("classifier")) {
      apply_json(cj.at("classifier"), c.classifier, where + ".classifier");
    }
    if (cj.contains("train")) apply_json(cj.at("train"), c.train_config, where + ".train");
    cfg.candidates.push_back(std::move(c));
  }
  check_candidates(cfg.candidates);
  return cfg;
}

Json selection_to_json(const SelectionResult& result, const MetricSuite& suite) {
  Json j;
  j["winner"] = result.winner;
  j["metrics"] = suite.metrics;
  Json weights = Json::array();
  for (std::size_t i = 0; i < suite.metrics.size(); ++i) weights.push_back(suite.weight(i));
  j["weights"] = weights;
  Json cands = Json::array();
  for (const CandidateScore& s : result.scores) {
    Json c = {{"id", s.id}, {"failed", s.failed}};
    if (s.failed) {
      c["failure"] = s.failure;
      c["sum"] = nullptr;  // -inf has no JSON spelling
    } else {
      Json values = Json::object();
      for (std::size_t m = 0; m < suite.metrics.size(); ++m) values[suite.metrics[m]] = s.values[m];
      c["validation"] = values;
      c["sum"] = s.sum;
    }
    cands.push_back(std::move(c));
  }
  j["candidates"] = cands;
  const MetricsReport& t = result.winner_test_metrics;
  Json test = Json::object();
  for (const char* name : {"accuracy", "sensitivity", "specificity", "weighted_precision",
                           "weighted_recall", "weighted_f1"}) {
    test[name] = metric_value(t, name);
  }
  j["winner_test_metrics"] = test;
  j["test_evaluated"] = result.test_evaluated;
  return j;
}

std::string render_leaderboard(const SelectionResult& result, const MetricSuite& suite) {
  std::size_t width = 9;
  for (const CandidateScore& s : result.scores) width = std::max(width, s.id.size());
  std::ostringstream os;
  char buf[64];
  os << "Candidate" << std::string(width - 9, ' ');
  for (const std::string& m : suite.metrics) {
    std::snprintf(buf, sizeof(buf), " | %18s", m.c_str());
    os << buf;
  }
  os << " |        sum\n";
  for (std::size_t i = 0; i < result.scores.size(); ++i) {
    const CandidateScore& s = result.scores[i];
    os << s.id << std::string(width - s.id.size(), ' ');
    if (s.failed) {
      os << "  failed: " << s.failure << '\n';
      continue;
    }
    for (double v : s.values) {
      std::snprintf(buf, sizeof(buf), " | %18.4f", v);
      os << buf;
    }
    std::snprintf(buf, sizeof(buf), " | %10.4f", s.sum);
    os << buf << (i == result.winner_index ? "  *" : "") << '\n';
  }
  return os.str();
}

}  // namespace vte
