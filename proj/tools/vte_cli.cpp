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

// Command-line front end: one subcommand per pipeline stage plus the
// end-to-end `pipeline run` and the `apms run` model sweep.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vte/apms.hpp"
#include "vte/augment.hpp"
#include "vte/classifier.hpp"
#include "vte/config.hpp"
#include "vte/corpus.hpp"
#include "vte/embed.hpp"
#include "vte/error.hpp"
#include "vte/hybrid.hpp"
#include "vte/metrics.hpp"
#include "vte/pipeline.hpp"
#include "vte/rules.hpp"
#include "vte/tokenizer.hpp"

namespace fs = std::filesystem;
using namespace vte;

namespace {

// Writes to a file, or stdout for "-" / empty.
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  write_text_file(path, content);
}

RuleSet load_rules(const std::string& path) {
  return path.empty() || path == "demo" ? RuleSet::demo_pe() : RuleSet::load(path);
}

// A model file plus the tokenizer and embedding settings it was trained with.
struct LoadedModel {
  ModelParams params;
  LabelScheme scheme;
  TokenizerConfig tokenizer;
  EmbeddingProviderSpec embedding;
};

LoadedModel load_trained(const std::string& path) {
  std::string meta_text;
  LoadedModel m;
  m.params = load_model(path, &meta_text);
  const Json meta = Json::parse(meta_text);
  if (!meta.contains("scheme") || !meta.contains("tokenizer") || !meta.contains("embedding")) {
    throw ValidationError("model " + path + " lacks scheme/tokenizer/embedding metadata");
  }
  m.scheme = LabelScheme::by_name(meta.at("scheme").get<std::string>());
  apply_json(meta.at("tokenizer"), m.tokenizer);
  apply_json(meta.at("embedding"), m.embedding);
  return m;
}

std::vector<Example> as_examples(const std::vector<EmbeddingMatrix>& xs,
                                 const std::vector<Report>& reports) {
  std::vector<Example> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!reports[i].label) throw ValidationError("report '" + reports[i].id + "' has no label");
    out.push_back({&xs[i], *reports[i].label});
  }
  return out;
}

std::vector<Report> select_split(const std::vector<Report>& reports, const std::string& split) {
  if (split.empty() || split == "all") return reports;
  return filter_split(reports, parse_split(split));
}

Json verdict_json(const Report& r, const RuleVerdict& v) {
  Json matches = Json::array();
  for (const auto& sentence : v.matched_spans) {
    Json s = Json::array();
    for (const RuleMatch& m : sentence) {
      s.push_back({{"rule", m.rule_index}, {"text", m.matched_text}, {"negated", m.negated}});
    }
    matches.push_back(s);
  }
  return {{"id", r.id},
          {"report_score", v.report_score},
          {"positive", v.positive},
          {"sentence_scores", v.sentence_scores},
          {"matches", matches}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VTE radiology report classification toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  std::function<void()> action;

  // corpus gen | split
  auto* corpus = app.add_subcommand("corpus", "Generate or split report corpora");
  corpus->require_subcommand(1);

  std::string gen_preset = "pe", gen_out;
  SynthSpec gen_spec;
  std::vector<double> gen_props;
  auto* gen = corpus->add_subcommand("gen", "Generate a synthetic labelled corpus");
  gen->add_option("--preset", gen_preset, "pe or dvt")->check(CLI::IsMember({"pe", "dvt"}));
  gen->add_option("--n", gen_spec.n_reports, "Number of reports");
  gen->add_option("--seed", gen_spec.seed, "Random seed");
  gen->add_option("--proportions", gen_props, "Class proportions, in class-id order")
      ->delimiter(',');
  gen->add_option("--mean-length", gen_spec.mean_length_tokens, "Mean report length in tokens");
  gen->add_option("--negation-rate", gen_spec.negation_rate, "Share of negated sentences");
  gen->add_option("--out", gen_out, "Output JSONL (default stdout)");
  gen->callback([&] {
    action = [&] {
      const LabelScheme scheme = LabelScheme::by_name(gen_preset);
      if (!gen_props.empty()) {
        gen_spec.class_proportions = gen_props;
      } else if (gen_preset == "dvt") {
        gen_spec.class_proportions = RunConfig::preset("dvt").synthetic.class_proportions;
      }
      std::ostringstream os;
      write_corpus(os, generate_synthetic(gen_spec, scheme));
      emit(gen_out, os.str());
    };
  });

  std::string split_in, split_out, split_scheme = "pe";
  SplitSpec split_spec;
  auto* split = corpus->add_subcommand("split", "Assign train/validation/test splits");
  split->add_option("--corpus", split_in, "Input JSONL")->required();
  split->add_option("--scheme", split_scheme, "Label scheme (pe or dvt)");
  split->add_option("--seed", split_spec.seed, "Random seed");
  split->add_option("--test-frac,--test-fraction", split_spec.test_fraction, "Share of reports held out for test");
  split->add_option("--val-frac,--val-fraction", split_spec.validation_fraction_of_train,
                    "Share of the non-test reports used for validation");
  bool stratified = true;
  split->add_flag("--stratified,!--no-stratify", stratified,
                  "Stratify by class (default); --no-stratify shuffles everything");
  split->add_option("--out", split_out, "Output JSONL (default stdout)");
  split->callback([&] {
    action = [&] {
      split_spec.stratified = stratified;
      auto reports = load_corpus(split_in, LabelScheme::by_name(split_scheme));
      std::ostringstream os;
      write_corpus(os, split_corpus(std::move(reports), split_spec));
      emit(split_out, os.str());
    };
  });

  // augment
  std::string aug_in, aug_out, aug_scheme = "pe", aug_mode = "synonym", aug_lexicon, aug_ppdb;
  AugmentConfig aug_cfg;
  std::optional<std::size_t> aug_max;
  auto* aug = app.add_subcommand("augment", "Generate minority-class reports from the train split");
  aug->add_option("--corpus", aug_in, "Input JSONL")->required();
  aug->add_option("--scheme", aug_scheme, "Label scheme (pe or dvt)");
  aug->add_option("--mode", aug_mode, "synonym or swap")->check(CLI::IsMember({"synonym", "swap"}));
  aug->add_option("--n", aug_cfg.n, "Number of generated reports");
  aug->add_option("--seed", aug_cfg.seed, "Random seed");
  std::optional<double> aug_p;
  aug->add_option("--p", aug_p, "Edit share for the selected mode");
  aug->add_option("--p-replace", aug_cfg.p_replace, "Edit share for synonym replacement");
  aug->add_option("--p-swap", aug_cfg.p_swap, "Edit share for random swapping");
  aug->add_option("--aug-min", aug_cfg.aug_min, "Minimum edits per report");
  aug->add_option("--aug-max", aug_max, "Maximum edits per report");
  aug->add_option("--lexicon", aug_lexicon, "Synonym TSV (default: shipped clinical lexicon)");
  aug->add_option("--ppdb", aug_ppdb, "PPDB-format paraphrase file instead of a TSV lexicon");
  aug->add_option("--out", aug_out, "Output JSONL (default stdout)");
  aug->callback([&] {
    action = [&] {
      aug_cfg.mode = parse_augment_mode(aug_mode);
      aug_cfg.aug_max = aug_max;
      if (aug_p) (aug_cfg.mode == AugmentMode::kSynonymReplacement ? aug_cfg.p_replace : aug_cfg.p_swap) = *aug_p;
      const LabelScheme scheme = LabelScheme::by_name(aug_scheme);
      auto reports = load_corpus(aug_in, scheme);
      // Split corpora contribute their train portion only.
      const bool has_splits = std::any_of(reports.begin(), reports.end(),
                                          [](const Report& r) { return r.split.has_value(); });
      if (has_splits) reports = filter_split(reports, Split::kTrain);
      SynonymLexicon lexicon;
      if (!aug_ppdb.empty()) {
        std::ifstream in(aug_ppdb);
        if (!in) throw IoError("cannot open " + aug_ppdb);
        lexicon = SynonymLexicon::parse_ppdb(in);
      } else {
        lexicon = aug_lexicon.empty() ? SynonymLexicon::demo_clinical()
                                      : SynonymLexicon::load_tsv(aug_lexicon);
      }
      std::ostringstream os;
      write_corpus(os, augment_corpus(reports, scheme, aug_cfg, lexicon));
      emit(aug_out, os.str());
    };
  });

  // tokenize
  std::string tok_preset = "pe", tok_in, tok_text, tok_out;
  std::optional<std::size_t> tok_max_len;
  auto* tok = app.add_subcommand("tokenize", "Tokenize reports into fixed-length sequences");
  tok->add_option("--preset", tok_preset, "pe (512, left) or dvt (170, right)")
      ->check(CLI::IsMember({"pe", "dvt"}));
  tok->add_option("--max-len", tok_max_len, "Override the preset sequence length");
  auto* tok_src = tok->add_option("--corpus", tok_in, "Input JSONL");
  tok->add_option("--text", tok_text, "Tokenize one literal text")->excludes(tok_src);
  tok->add_option("--out", tok_out, "Output JSONL (default stdout)");
  tok->callback([&] {
    action = [&] {
      TokenizerConfig cfg = TokenizerConfig::by_preset(tok_preset);
      if (tok_max_len) cfg.max_len = *tok_max_len;
      cfg.validate();
      std::vector<Report> reports;
      if (!tok_in.empty()) {
        std::ifstream in(tok_in);
        if (!in) throw IoError("cannot open " + tok_in);
        LabelScheme any = LabelScheme::dvt();  // widest label range
        reports = parse_corpus(in, any);
      } else {
        reports.push_back({"text", tok_text, std::nullopt, std::nullopt});
      }
      std::ostringstream os;
      for (const Report& r : reports) {
        const TokenSeq s = tokenize(r.text, cfg);
        os << Json{{"id", r.id},
                   {"tokens", s.tokens},
                   {"original_length", s.original_length},
                   {"pad_length", s.pad_length}}
                  .dump()
           << '\n';
      }
      emit(tok_out, os.str());
    };
  });

  // embed
  std::string emb_in, emb_out, emb_preset = "pe", emb_kind = "hashed";
  EmbeddingProviderSpec emb_spec;
  bool emb_trim = false;
  auto* emb = app.add_subcommand("embed", "Embed tokenized reports into a binary record file");
  emb->add_option("--corpus", emb_in, "Input JSONL")->required();
  emb->add_option("--preset", emb_preset, "Tokenizer preset")->check(CLI::IsMember({"pe", "dvt"}));
  emb->add_option("--provider,--kind", emb_kind, "hashed or constant")
      ->check(CLI::IsMember({"hashed", "constant"}));
  emb->add_option("--dim", emb_spec.dim, "Vector width");
  emb->add_option("--seed", emb_spec.seed, "Hashing seed");
  emb->add_flag("--trim-padding", emb_trim,
                "Drop pad rows (smaller files, not loadable as a precomputed provider)");
  emb->add_option("--out", emb_out, "Output record file")->required();
  emb->callback([&] {
    action = [&] {
      emb_spec.kind = parse_embedding_kind(emb_kind);
      const TokenizerConfig cfg = TokenizerConfig::by_preset(emb_preset);
      const auto provider = make_provider(emb_spec);
      std::ifstream in(emb_in);
      if (!in) throw IoError("cannot open " + emb_in);
      const auto reports = parse_corpus(in, LabelScheme::dvt());
      std::ofstream out(emb_out, std::ios::binary);
      if (!out) throw IoError("cannot write " + emb_out);
      for (const Report& r : reports) {
        EmbeddingMatrix m = provider->embed(tokenize(r.text, cfg), r.id);
        if (emb_trim) trim_padding(m);
        write_embedding_record(out, r.id, m);
      }
    };
  });

  // train
  std::string tr_in, tr_out, tr_config, tr_scheme = "pe", tr_kind, tr_emb_kind;
  std::optional<std::size_t> tr_hidden, tr_layers, tr_epochs, tr_batch, tr_dim;
  std::optional<double> tr_lr;
  std::optional<std::uint64_t> tr_seed;
  auto* trn = app.add_subcommand("train", "Train a classifier on the train split");
  trn->add_option("--corpus", tr_in, "Split JSONL")->required();
  trn->add_option("--scheme", tr_scheme, "Label scheme (pe or dvt)");
  trn->add_option("--config", tr_config,
                  "JSON with optional tokenizer/embedding/classifier/train sections");
  trn->add_option("--model,--kind", tr_kind, "bilstm, lstm or linear");
  trn->add_option("--embedding", tr_emb_kind, "hashed or constant");
  trn->add_option("--dim", tr_dim, "Embedding width");
  trn->add_option("--hidden", tr_hidden, "Hidden size");
  trn->add_option("--layers", tr_layers, "Recurrent layers");
  trn->add_option("--epochs", tr_epochs, "Epochs");
  trn->add_option("--batch", tr_batch, "Batch size");
  trn->add_option("--lr", tr_lr, "Learning rate");
  trn->add_option("--seed", tr_seed, "Training seed");
  trn->add_option("--out", tr_out, "Model file")->required();
  trn->callback([&] {
    action = [&] {
      const LabelScheme scheme = LabelScheme::by_name(tr_scheme);
      TokenizerConfig tcfg = TokenizerConfig::by_preset(tr_scheme);
      EmbeddingProviderSpec espec;
      ClassifierSpec cspec;
      cspec.num_classes = static_cast<std::size_t>(scheme.num_classes());
      TrainConfig tc;
      if (!tr_config.empty()) {
        const Json j = read_json_file(tr_config);
        require_keys(j, {"tokenizer", "embedding", "classifier", "train"}, "train config");
        if (j.contains("tokenizer")) apply_json(j.at("tokenizer"), tcfg);
        if (j.contains("embedding")) apply_json(j.at("embedding"), espec);
        cspec.input_dim = espec.dim;
        if (j.contains("classifier")) apply_json(j.at("classifier"), cspec);
        if (j.contains("train")) apply_json(j.at("train"), tc);
      }
      if (!tr_emb_kind.empty()) espec.kind = parse_embedding_kind(tr_emb_kind);
      if (tr_dim) espec.dim = cspec.input_dim = *tr_dim;
      if (!tr_kind.empty()) cspec.kind = parse_classifier_kind(tr_kind);
      if (tr_hidden) cspec.hidden_size = *tr_hidden;
      if (tr_layers) cspec.num_layers = *tr_layers;
      if (tr_epochs) tc.epochs = *tr_epochs;
      if (tr_batch) tc.batch_size = *tr_batch;
      if (tr_lr) tc.learning_rate = *tr_lr;
      if (tr_seed) tc.seed = *tr_seed;
      cspec.validate();
      tc.validate();
      const auto reports = load_corpus(tr_in, scheme);
      const auto train_r = filter_split(reports, Split::kTrain);
      const auto val_r = filter_split(reports, Split::kValidation);
      if (train_r.empty() || val_r.empty()) {
        throw ValidationError("training needs train and validation splits; run `corpus split` first");
      }
      const auto provider = make_provider(espec);
      const auto train_x = embed_reports(train_r, tcfg, *provider);
      const auto val_x = embed_reports(val_r, tcfg, *provider);
      const TrainResult result =
          train(cspec, as_examples(train_x, train_r), as_examples(val_x, val_r), tc);
      for (const EpochRecord& e : result.history) {
        std::printf("epoch %zu  loss %.6f  val_acc %.4f  val_f1 %.4f\n", e.epoch, e.train_loss,
                    e.validation_accuracy, e.validation_weighted_f1);
      }
      std::printf("best epoch %zu\n", result.best_epoch);
      const Json meta = {{"scheme", scheme.name},
                         {"tokenizer", to_json(tcfg)},
                         {"embedding", to_json(espec)},
                         {"best_epoch", result.best_epoch}};
      save_model(tr_out, result.params, meta.dump());
    };
  });

  // evaluate
  std::string ev_model, ev_in, ev_split = "test", ev_out, ev_roc;
  auto* ev = app.add_subcommand("evaluate", "Score a trained model on one split");
  ev->add_option("--model", ev_model, "Model file")->required();
  ev->add_option("--corpus", ev_in, "Split JSONL")->required();
  ev->add_option("--split", ev_split, "train, validation, test or all");
  ev->add_option("--out", ev_out, "Metrics CSV");
  ev->add_option("--roc", ev_roc, "ROC points CSV");
  ev->callback([&] {
    action = [&] {
      const LoadedModel m = load_trained(ev_model);
      const auto reports = select_split(load_corpus(ev_in, m.scheme), ev_split);
      if (reports.empty()) throw ValidationError("split '" + ev_split + "' is empty");
      const auto provider = make_provider(m.embedding);
      const auto xs = embed_reports(reports, m.tokenizer, *provider);
      const Evaluation e = evaluate(m.params, as_examples(xs, reports));
      const std::vector<NamedReport> named = {{"DL", e.metrics}};
      std::cout << render_table(named);
      for (const auto& [cls, auc] : e.metrics.per_class_auc) {
        std::printf("AUC class %d: %.4f\n", cls, auc);
      }
      if (!ev_out.empty()) write_text_file(ev_out, render_csv(named));
      if (!ev_roc.empty()) write_text_file(ev_roc, render_roc_csv(named));
    };
  });

  // rules score
  auto* rules = app.add_subcommand("rules", "Rule-based classifier");
  rules->require_subcommand(1);
  std::string rs_rules = "demo", rs_in, rs_out, rs_split = "all";
  auto* rs = rules->add_subcommand("score", "Score each report with a ruleset");
  rs->add_option("--ruleset", rs_rules, "Ruleset file, or 'demo'");
  rs->add_option("--corpus", rs_in, "Input JSONL")->required();
  rs->add_option("--split", rs_split, "train, validation, test or all");
  rs->add_option("--out", rs_out, "Output JSONL (default stdout)");
  rs->callback([&] {
    action = [&] {
      const RuleSet set = load_rules(rs_rules);
      const auto reports = select_split(load_corpus(rs_in, LabelScheme::pe()), rs_split);
      std::ostringstream os;
      for (const Report& r : reports) os << verdict_json(r, score_report(r.text, set)).dump() << '\n';
      emit(rs_out, os.str());
    };
  });

  // hybrid predict
  auto* hybrid = app.add_subcommand("hybrid", "Combined model and rule classifier");
  hybrid->require_subcommand(1);
  std::string hy_model, hy_rules = "demo", hy_in, hy_out, hy_split = "all";
  HybridConfig hy_cfg;
  auto* hp = hybrid->add_subcommand("predict", "Per-report combined predictions");
  hp->add_option("--model", hy_model, "Model file")->required();
  hp->add_option("--ruleset", hy_rules, "Ruleset file, or 'demo'");
  hp->add_option("--corpus", hy_in, "Input JSONL")->required();
  hp->add_option("--split", hy_split, "train, validation, test or all");
  hp->add_option("--confidence-cutoff", hy_cfg.negative_confidence_cutoff,
                 "p(negative) above which a lone rule hit is ignored");
  hp->add_option("--score-cutoff", hy_cfg.rule_score_cutoff,
                 "Rule score at which the rule always wins");
  hp->add_option("--out", hy_out, "Output JSONL (default stdout)");
  hp->callback([&] {
    action = [&] {
      hy_cfg.validate();
      const LoadedModel m = load_trained(hy_model);
      const RuleSet set = load_rules(hy_rules);
      const auto reports = select_split(load_corpus(hy_in, m.scheme), hy_split);
      const auto provider = make_provider(m.embedding);
      std::ostringstream os;
      for (const Report& r : reports) {
        EmbeddingMatrix x = provider->embed(tokenize(r.text, m.tokenizer), r.id);
        trim_padding(x);
        const HybridDecision d = combine(forward(m.params, x), score_report(r.text, set), hy_cfg);
        os << Json{{"id", r.id},
                   {"dl_probs", d.dl_prediction.probabilities},
                   {"rule_score", d.rule_verdict.report_score},
                   {"final", d.final_class},
                   {"source", hybrid_source_name(d.source)}}
                  .dump()
           << '\n';
      }
      emit(hy_out, os.str());
    };
  });

  // apms run
  auto* apms = app.add_subcommand("apms", "Model selection over candidate pipelines");
  apms->require_subcommand(1);
  std::string ap_config, ap_in, ap_out;
  auto* ap = apms->add_subcommand("run", "Train candidates, pick the best on validation");
  ap->add_option("--config", ap_config, "Selection config JSON")->required();
  ap->add_option("--corpus", ap_in, "Split JSONL")->required();
  ap->add_option("--out", ap_out, "Output directory")->required();
  ap->callback([&] {
    action = [&] {
      const SelectionConfig cfg = parse_selection_config(read_json_file(ap_config));
      const auto reports = load_corpus(ap_in, LabelScheme::by_name(cfg.scheme));
      const SelectionResult result = run_selection(cfg.candidates, reports, cfg.suite, cfg.tokenizer);
      const fs::path out = resolve_output_dir(ap_out);
      fs::create_directories(out);
      write_text_file(out / "selection.json", selection_to_json(result, cfg.suite).dump(2) + "\n");
      const std::string board = render_leaderboard(result, cfg.suite);
      write_text_file(out / "leaderboard.txt", board);
      const Candidate& w = cfg.candidates[result.winner_index];
      const Json meta = {{"scheme", cfg.scheme},
                         {"tokenizer", to_json(cfg.tokenizer)},
                         {"embedding", to_json(w.embedding)},
                         {"candidate", w.id}};
      save_model(out / "model.bin", result.winner_params, meta.dump());
      std::cout << board << "winner: " << result.winner << '\n';
    };
  });

  // pipeline run
  auto* pipe = app.add_subcommand("pipeline", "End-to-end runs");
  pipe->require_subcommand(1);
  std::string pl_config, pl_out, pl_dataset;
  std::optional<std::uint64_t> pl_seed;
  std::optional<std::size_t> pl_epochs;
  bool pl_dry = false;
  auto* pr = pipe->add_subcommand("run", "Run every stage from corpus to hybrid evaluation");
  pr->add_option("--config", pl_config, "Run config JSON");
  pr->add_option("--dataset", pl_dataset, "pe, dvt or custom (overrides the file)");
  pr->add_option("--seed", pl_seed, "Global seed (overrides the file)");
  pr->add_option("--epochs", pl_epochs, "Training epochs (overrides the file)");
  pr->add_option("--out", pl_out, "Output directory (overrides the file)");
  pr->add_flag("--dry-run", pl_dry, "Validate the config and print the stage plan");
  pr->callback([&] {
    action = [&] {
      Json j = pl_config.empty() ? Json::object() : read_json_file(pl_config);
      if (!pl_dataset.empty()) j["dataset"] = pl_dataset;
      if (pl_seed) j["seed"] = *pl_seed;
      if (!pl_out.empty()) j["output_dir"] = pl_out;
      if (pl_epochs) j["train"]["epochs"] = *pl_epochs;
      const RunConfig cfg = RunConfig::from_json(j);
      cfg.validate();
      if (pl_dry) {
        std::cout << "config ok; output " << resolve_output_dir(cfg.output_dir).string() << '\n';
        std::size_t i = 1;
        for (const std::string& s : stage_plan(cfg)) std::cout << i++ << ". " << s << '\n';
        return;
      }
      const RunOutcome outcome = run_pipeline(cfg);
      std::cout << render_table(outcome.test_reports)
                << "outputs in " << outcome.output_dir.string() << '\n';
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (action) action();
  } catch (const StageError& e) {
    std::fprintf(stderr, "error [%s]: %s\n", e.stage().c_str(), e.what());
    return 3;
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", e.category().c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
