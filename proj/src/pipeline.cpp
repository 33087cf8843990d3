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

#include "vte/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <set>
#include <sstream>

#include "vte/error.hpp"
#include "vte/kernels.hpp"
#include "vte/rng.hpp"
#include "vte/rules.hpp"

namespace vte {
namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json id_list(const std::vector<Report>& reports) {
  Json ids = Json::array();
  for (const Report& r : reports) ids.push_back(r.id);
  return ids;
}

Json class_counts(const std::vector<Report>& reports, const LabelScheme& scheme) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(scheme.num_classes()), 0);
  for (const Report& r : reports) {
    if (r.label) ++counts[static_cast<std::size_t>(*r.label)];
  }
  return counts;
}

// Exclusive-create lock; removed on scope exit.
class LockFile {
 public:
  explicit LockFile(fs::path path) : path_(std::move(path)) {
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (f == nullptr) {
      throw IoError("output directory is locked by another run (" + path_.string() +
                    "); remove the file if no run is active");
    }
    std::fprintf(f, "%s\n", utc_now().c_str());
    std::fclose(f);
  }
  ~LockFile() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  LockFile(const LockFile&) = delete;
  LockFile& operator=(const LockFile&) = delete;

 private:
  fs::path path_;
};

void check_no_leak(const std::vector<Report>& inputs, const std::set<std::string>& held_out,
                   std::string_view what) {
  for (const Report& r : inputs) {
    if (held_out.count(r.id) != 0) {
      throw ValidationError(std::string(what) + " input contains held-out report '" + r.id + "'");
    }
  }
}

std::vector<Example> examples_for(const std::vector<EmbeddingMatrix>& xs,
                                  const std::vector<Report>& reports, std::size_t offset,
                                  std::size_t count) {
  std::vector<Example> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back({&xs[offset + i], reports[offset + i].label.value()});
  }
  return out;
}

std::string render_history(const std::vector<EpochRecord>& history) {
  std::ostringstream os;
  os << "epoch,train_loss,validation_accuracy,validation_weighted_f1\n";
  for (const EpochRecord& e : history) {
    os << e.epoch << ',' << g17(e.train_loss) << ',' << g17(e.validation_accuracy) << ','
       << g17(e.validation_weighted_f1) << '\n';
  }
  return os.str();
}

// Mutable state threaded through the stages.
struct RunState {
  RunState(const RunConfig& c, LabelScheme s, fs::path o)
      : config(c), scheme(std::move(s)), out(std::move(o)) {}

  const RunConfig& config;
  LabelScheme scheme;
  fs::path out;
  Json stages = Json::array();
  std::vector<std::string> files;

  std::vector<Report> reports;  // split-assigned corpus
  std::vector<Report> train_reports, val_reports, test_reports, augmented;
  // Ordered train, augmented, validation, test.
  std::vector<Report> ordered;
  std::vector<TokenSeq> sequences;
  std::vector<EmbeddingMatrix> embeddings;
  ModelParams params;
  Evaluation dl;
  std::vector<RuleVerdict> verdicts;
  std::vector<NamedReport> named;
  std::vector<HybridDecision> decisions;

  void emit(Json& stage, const std::string& name, std::string_view content) {
    write_text_file(out / name, content);
    stage["outputs"].push_back(name);
    files.push_back(name);
  }
};

void write_evaluation_outputs(RunState& st, Json& stage) {
  st.emit(stage, "metrics.csv", render_csv(st.named));
  st.emit(stage, "metrics.txt", render_table(st.named));
  st.emit(stage, "roc.csv", render_roc_csv(st.named));
  std::ostringstream os;
  for (std::size_t i = 0; i < st.test_reports.size(); ++i) {
    const Prediction& p = st.dl.predictions[i];
    Json rec = {{"id", st.test_reports[i].id},
                {"truth", st.dl.truths[i]},
                {"dl_probs", p.probabilities},
                {"dl_prediction", p.predicted_class}};
    if (!st.decisions.empty()) {
      const HybridDecision& d = st.decisions[i];
      rec["rule_score"] = d.rule_verdict.report_score;
      rec["rule_positive"] = d.rule_verdict.positive;
      rec["final"] = d.final_class;
      rec["source"] = hybrid_source_name(d.source);
    } else {
      rec["final"] = p.predicted_class;
      rec["source"] = hybrid_source_name(HybridSource::kDl);
    }
    os << rec.dump() << '\n';
  }
  st.emit(stage, "predictions.jsonl", os.str());
}

}  // namespace

void RunConfig::validate() const {
  if (dataset != "pe" && dataset != "dvt" && dataset != "custom") {
    throw ValidationError("dataset must be 'pe', 'dvt' or 'custom', got '" + dataset + "'");
  }
  if (dataset == "custom" && corpus_path.empty()) {
    throw ValidationError("custom dataset needs a corpus path");
  }
  if (dataset != "custom" && !corpus_path.empty()) {
    throw ValidationError("a corpus path is only used with the custom dataset");
  }
  if (dataset != "custom" && scheme != dataset) {
    throw ValidationError("dataset preset '" + dataset + "' implies scheme '" + dataset +
                          "', got '" + scheme + "'");
  }
  const LabelScheme s = label_scheme();
  if (!rules_enabled() && ruleset_path) {
    throw ValidationError("rules and the hybrid combiner are defined for the pe scheme only; '" +
                          scheme + "' runs may not name a ruleset");
  }
  if (dataset != "custom") synthetic.validate(s);
  split.validate();
  tokenizer.validate();
  if (augment_enabled) augment.validate();
  embedding.validate();
  classifier.validate();
  train.validate();
  hybrid.validate();
  if (classifier.num_classes != static_cast<std::size_t>(s.num_classes())) {
    throw ValidationError("classifier num_classes " + std::to_string(classifier.num_classes) +
                          " does not match scheme '" + scheme + "' (" +
                          std::to_string(s.num_classes()) + " classes)");
  }
  if (classifier.input_dim != embedding.dim) {
    throw ValidationError("classifier input_dim " + std::to_string(classifier.input_dim) +
                          " != embedding dim " + std::to_string(embedding.dim));
  }
  if (output_dir.empty()) throw ValidationError("output directory must not be empty");
}

RunConfig RunConfig::preset(std::string_view dataset) {
  RunConfig c;
  if (dataset == "pe") {
    c.dataset = "pe";
    c.scheme = "pe";
  } else if (dataset == "dvt") {
    c.dataset = "dvt";
    c.scheme = "dvt";
    c.tokenizer = TokenizerConfig::dvt();
    c.synthetic.class_proportions = {0.80, 0.07, 0.13};
    c.classifier.num_classes = 3;
  } else if (dataset == "custom") {
    c.dataset = "custom";
  } else {
    throw ValidationError("unknown dataset preset '" + std::string(dataset) + "'");
  }
  return c;
}

RunConfig RunConfig::from_json(const Json& j) {
  require_keys(j,
               {"dataset", "corpus", "scheme", "synthetic", "split", "tokenizer", "augment",
                "lexicon", "embedding", "classifier", "train", "ruleset", "hybrid", "output_dir",
                "seed"},
               "config");
  RunConfig c = preset(j.value("dataset", std::string("pe")));
  try {
    if (j.contains("scheme")) {
      c.scheme = j.at("scheme").get<std::string>();
      if (c.dataset == "custom") {
        const LabelScheme s = LabelScheme::by_name(c.scheme);
        c.classifier.num_classes = static_cast<std::size_t>(s.num_classes());
        if (c.scheme == "dvt") c.tokenizer = TokenizerConfig::dvt();
      }
    }
    if (j.contains("corpus")) c.corpus_path = j.at("corpus").get<std::string>();
    if (j.contains("synthetic")) apply_json(j.at("synthetic"), c.synthetic);
    if (j.contains("split")) apply_json(j.at("split"), c.split);
    if (j.contains("tokenizer")) apply_json(j.at("tokenizer"), c.tokenizer);
    if (j.contains("augment")) {
      Json a = j.at("augment");
      if (a.is_object() && a.contains("enabled")) {
        c.augment_enabled = a.at("enabled").get<bool>();
        a.erase("enabled");
      }
      apply_json(a, c.augment);
    }
    if (j.contains("lexicon")) c.lexicon_path = j.at("lexicon").get<std::string>();
    if (j.contains("embedding")) apply_json(j.at("embedding"), c.embedding);
    c.classifier.input_dim = c.embedding.dim;
    if (j.contains("classifier")) apply_json(j.at("classifier"), c.classifier);
    if (j.contains("train")) apply_json(j.at("train"), c.train);
    if (j.contains("ruleset") && !j.at("ruleset").is_null()) {
      const std::string r = j.at("ruleset").get<std::string>();
      c.ruleset_path = r == "demo" ? fs::path() : fs::path(r);
    }
    if (j.contains("hybrid")) apply_json(j.at("hybrid"), c.hybrid);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

Json RunConfig::to_json() const {
  Json j;
  j["dataset"] = dataset;
  j["corpus"] = corpus_path.string();
  j["scheme"] = scheme;
  j["synthetic"] = vte::to_json(synthetic);
  j["split"] = vte::to_json(split);
  j["tokenizer"] = vte::to_json(tokenizer);
  Json a = vte::to_json(augment);
  a["enabled"] = augment_enabled;
  j["augment"] = a;
  j["lexicon"] = lexicon_path.string();
  j["embedding"] = vte::to_json(embedding);
  j["classifier"] = vte::to_json(classifier);
  j["train"] = vte::to_json(train);
  j["ruleset"] = ruleset_path ? Json(ruleset_path->empty() ? "demo" : ruleset_path->string())
                              : Json(nullptr);
  j["hybrid"] = vte::to_json(hybrid);
  j["output_dir"] = output_dir.string();
  j["seed"] = seed;
  return j;
}

RunConfig resolve_seeds(RunConfig config) {
  config.synthetic.seed = derive_seed(config.seed, 1);
  config.split.seed = derive_seed(config.seed, 2);
  config.augment.seed = derive_seed(config.seed, 3);
  config.train.seed = derive_seed(config.seed, 4);
  return config;
}

fs::path resolve_output_dir(const fs::path& dir) {
  if (dir.is_absolute()) return dir;
  const char* root = std::getenv(kOutputRootEnv);
  if (root != nullptr && *root != '\0') return fs::path(root) / dir;
  return dir;
}

std::vector<std::string> stage_plan(const RunConfig& config) {
  std::vector<std::string> plan = {"corpus", "split",    "augment", "tokenize",
                                   "embed",  "train",    "evaluate"};
  if (config.rules_enabled()) {
    plan.push_back("rules");
    plan.push_back("hybrid");
  }
  return plan;
}

RunOutcome run_pipeline(const RunConfig& input) {
  input.validate();
  const RunConfig config = resolve_seeds(input);
  const fs::path out = resolve_output_dir(config.output_dir);
  fs::create_directories(out);
  LockFile lock(out / ".vte.lock");

  Json hashed = config.to_json();
  hashed.erase("output_dir");  // same run, different place: same hash
  const std::string config_hash = content_digest(hashed.dump());

  RunState st(config, config.label_scheme(), out);
  Json manifest;
  manifest["tool"] = "vte";
  manifest["version"] = kVersion;
  manifest["config_hash"] = config_hash;
  manifest["seed"] = config.seed;
  manifest["kernel_isa"] = kernels::isa_name(kernels::active().isa);
  manifest["started_at"] = utc_now();

  const auto finish_manifest = [&](const std::string& status) {
    manifest["status"] = status;
    manifest["stages"] = st.stages;
    Json files = Json::array();
    for (const std::string& f : st.files) {
      const std::string bytes = read_text_file(out / f);
      files.push_back({{"path", f}, {"bytes", bytes.size()}, {"digest", content_digest(bytes)}});
    }
    manifest["files"] = files;
    manifest["finished_at"] = utc_now();
    write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
  };

  const auto run_stage = [&](const std::string& name, const std::function<void(Json&)>& body) {
    Json stage = {{"name", name},
                  {"status", "running"},
                  {"inputs", Json::object()},
                  {"outputs", Json::array()},
                  {"summary", Json::object()}};
    try {
      body(stage);
      if (stage["status"] == "running") stage["status"] = "completed";
      st.stages.push_back(stage);
    } catch (const std::exception& e) {
      stage["status"] = "failed";
      stage["error"] = e.what();
      st.stages.push_back(stage);
      manifest["failed_stage"] = name;
      try {
        finish_manifest("incomplete");
      } catch (const std::exception&) {
        // The original failure is the one worth reporting.
      }
      throw StageError(name, e.what());
    }
  };

  {
    Json stage = {{"name", "config"}};
    st.emit(stage, "config.json", config.to_json().dump(2) + "\n");
  }

  run_stage("corpus", [&](Json& stage) {
    if (config.dataset == "custom") {
      st.reports = load_corpus(config.corpus_path, st.scheme);
      stage["inputs"]["source"] = config.corpus_path.string();
    } else {
      st.reports = generate_synthetic(config.synthetic, st.scheme);
      stage["inputs"]["source"] = "synthetic:" + config.dataset;
    }
    for (const Report& r : st.reports) {
      if (!r.label) throw ValidationError("report '" + r.id + "' has no label");
    }
    stage["summary"]["reports"] = st.reports.size();
    stage["summary"]["class_counts"] = class_counts(st.reports, st.scheme);
  });

  run_stage("split", [&](Json& stage) {
    stage["inputs"]["ids"] = id_list(st.reports);
    const bool preassigned =
        !st.reports.empty() &&
        std::all_of(st.reports.begin(), st.reports.end(), [](const Report& r) { return r.split.has_value(); });
    if (!preassigned) st.reports = split_corpus(std::move(st.reports), config.split);
    stage["summary"]["preassigned"] = preassigned;
    st.train_reports = filter_split(st.reports, Split::kTrain);
    st.val_reports = filter_split(st.reports, Split::kValidation);
    st.test_reports = filter_split(st.reports, Split::kTest);
    if (st.train_reports.empty() || st.val_reports.empty() || st.test_reports.empty()) {
      throw ValidationError("train, validation and test splits must all be non-empty");
    }
    stage["summary"]["train"] = st.train_reports.size();
    stage["summary"]["validation"] = st.val_reports.size();
    stage["summary"]["test"] = st.test_reports.size();
    std::ostringstream os;
    write_corpus(os, st.reports);
    st.emit(stage, "corpus.jsonl", os.str());
  });

  std::set<std::string> held_out;
  for (const Report& r : st.val_reports) held_out.insert(r.id);
  for (const Report& r : st.test_reports) held_out.insert(r.id);

  run_stage("augment", [&](Json& stage) {
    stage["inputs"]["ids"] = id_list(st.train_reports);
    if (!config.augment_enabled) {
      stage["status"] = "skipped";
      return;
    }
    check_no_leak(st.train_reports, held_out, "augmentation");
    const SynonymLexicon lexicon = config.lexicon_path.empty()
                                       ? SynonymLexicon::demo_clinical()
                                       : SynonymLexicon::load_tsv(config.lexicon_path);
    st.augmented = augment_corpus(st.train_reports, st.scheme, config.augment, lexicon);
    stage["summary"]["generated"] = st.augmented.size();
    stage["summary"]["mode"] = augment_mode_name(config.augment.mode);
    std::ostringstream os;
    write_corpus(os, st.augmented);
    st.emit(stage, "augmented.jsonl", os.str());
  });

  run_stage("tokenize", [&](Json& stage) {
    st.ordered = st.train_reports;
    st.ordered.insert(st.ordered.end(), st.augmented.begin(), st.augmented.end());
    st.ordered.insert(st.ordered.end(), st.val_reports.begin(), st.val_reports.end());
    st.ordered.insert(st.ordered.end(), st.test_reports.begin(), st.test_reports.end());
    stage["inputs"]["ids"] = id_list(st.ordered);
    std::size_t truncated = 0, valid = 0;
    for (const Report& r : st.ordered) {
      st.sequences.push_back(tokenize(r.text, config.tokenizer));
      const TokenSeq& s = st.sequences.back();
      if (s.original_length + 1 > config.tokenizer.max_len) ++truncated;
      valid += s.valid_length();
    }
    stage["summary"]["sequences"] = st.sequences.size();
    stage["summary"]["truncated"] = truncated;
    stage["summary"]["mean_valid_length"] =
        static_cast<double>(valid) / static_cast<double>(st.sequences.size());
  });

  run_stage("embed", [&](Json& stage) {
    stage["inputs"]["ids"] = id_list(st.ordered);
    const auto provider = make_provider(config.embedding);
    st.embeddings.reserve(st.sequences.size());
    for (std::size_t i = 0; i < st.sequences.size(); ++i) {
      EmbeddingMatrix m = provider->embed(st.sequences[i], st.ordered[i].id);
      if (!m.all_finite()) throw EmbeddingError("non-finite embedding for '" + st.ordered[i].id + "'");
      trim_padding(m);
      st.embeddings.push_back(std::move(m));
    }
    st.sequences.clear();
    stage["summary"]["kind"] = embedding_kind_name(config.embedding.kind);
    stage["summary"]["dim"] = provider->dim();
  });

  const std::size_t n_train = st.train_reports.size() + st.augmented.size();
  const std::size_t n_val = st.val_reports.size();
  const std::size_t n_test = st.test_reports.size();

  run_stage("train", [&](Json& stage) {
    const std::vector<Report> fit(st.ordered.begin(), st.ordered.begin() + static_cast<long>(n_train));
    check_no_leak(fit, held_out, "training");
    stage["inputs"]["ids"] = id_list(fit);
    stage["inputs"]["validation_ids"] = id_list(st.val_reports);
    const auto train_set = examples_for(st.embeddings, st.ordered, 0, n_train);
    const auto val_set = examples_for(st.embeddings, st.ordered, n_train, n_val);
    TrainResult result = train(config.classifier, train_set, val_set, config.train);
    st.params = std::move(result.params);
    stage["summary"]["best_epoch"] = result.best_epoch;
    stage["summary"]["parameters"] = st.params.parameter_count();
    const Json meta = {{"scheme", config.scheme},
                       {"tokenizer", vte::to_json(config.tokenizer)},
                       {"embedding", vte::to_json(config.embedding)},
                       {"config_hash", config_hash},
                       {"best_epoch", result.best_epoch}};
    std::ostringstream model;
    write_model(model, st.params, meta.dump());
    st.emit(stage, "model.bin", model.str());
    st.emit(stage, "history.csv", render_history(result.history));
  });

  run_stage("evaluate", [&](Json& stage) {
    stage["inputs"]["ids"] = id_list(st.test_reports);
    const auto test_set = examples_for(st.embeddings, st.ordered, n_train + n_val, n_test);
    st.dl = evaluate(st.params, test_set);
    st.named.emplace_back("DL", st.dl.metrics);
    stage["summary"]["accuracy"] = st.dl.metrics.accuracy;
    stage["summary"]["specificity"] = st.dl.metrics.specificity;
    stage["summary"]["weighted_f1"] = st.dl.metrics.weighted_f1;
    if (!config.rules_enabled()) write_evaluation_outputs(st, stage);
  });

  if (config.rules_enabled()) {
    const int positive = 1 - config.hybrid.negative_class;
    const int negative = config.hybrid.negative_class;
    run_stage("rules", [&](Json& stage) {
      stage["inputs"]["ids"] = id_list(st.test_reports);
      const RuleSet rules = (config.ruleset_path && !config.ruleset_path->empty())
                                ? RuleSet::load(*config.ruleset_path)
                                : RuleSet::demo_pe();
      stage["summary"]["ruleset"] = rules.name();
      stage["summary"]["rules"] = rules.size();
      std::vector<int> preds;
      for (const Report& r : st.test_reports) {
        st.verdicts.push_back(score_report(r.text, rules));
        preds.push_back(st.verdicts.back().positive ? positive : negative);
      }
      const MetricsReport m = compute_metrics(st.dl.truths, preds, st.scheme);
      st.named.emplace_back("Rule", m);
      stage["summary"]["accuracy"] = m.accuracy;
      stage["summary"]["specificity"] = m.specificity;
    });

    run_stage("hybrid", [&](Json& stage) {
      stage["inputs"]["ids"] = id_list(st.test_reports);
      std::vector<int> preds;
      std::size_t overrides = 0, exceptions = 0;
      for (std::size_t i = 0; i < st.test_reports.size(); ++i) {
        st.decisions.push_back(combine(st.dl.predictions[i], st.verdicts[i], config.hybrid));
        const HybridDecision& d = st.decisions.back();
        overrides += d.source == HybridSource::kRuleOverride;
        exceptions += d.source == HybridSource::kDlConfidentException;
        preds.push_back(d.final_class);
      }
      const MetricsReport m = compute_metrics(st.dl.truths, preds, st.scheme);
      st.named.emplace_back("DL + Rule", m);
      stage["summary"]["accuracy"] = m.accuracy;
      stage["summary"]["specificity"] = m.specificity;
      stage["summary"]["rule_overrides"] = overrides;
      stage["summary"]["confident_exceptions"] = exceptions;
      write_evaluation_outputs(st, stage);
    });
  }

  finish_manifest("complete");
  return RunOutcome{manifest, out, st.named};
}

}  // namespace vte
