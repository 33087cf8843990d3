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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vte/corpus.hpp"
#include "vte/rng.hpp"

namespace vte {

// Word -> single-word synonyms. Keys are stored lowercased; lookups ignore case.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  // Self-synonyms and duplicates are dropped; an entry left empty is removed.
  void add(std::string_view word, const std::vector<std::string>& synonyms);

  // Null when the word has no entry.
  const std::vector<std::string>* lookup(std::string_view word) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }

  // "word<TAB>syn1|syn2|..." per line; '#' starts a comment line.
  static SynonymLexicon parse_tsv(std::istream& in);
  static SynonymLexicon load_tsv(const std::filesystem::path& path);
  // PPDB rows "LHS ||| phrase ||| paraphrase ||| ..."; only single-word pairs kept.
  static SynonymLexicon parse_ppdb(std::istream& in);
  // The shipped clinical lexicon (data/clinical_synonyms.tsv).
  static SynonymLexicon demo_clinical();

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

enum class AugmentMode { kSynonymReplacement, kRandomSwapping };

std::string_view augment_mode_name(AugmentMode mode);
AugmentMode parse_augment_mode(std::string_view name);

struct AugmentConfig {
  AugmentMode mode = AugmentMode::kSynonymReplacement;
  double p_replace = 0.8;
  double p_swap = 0.2;
  std::size_t aug_min = 30;
  std::optional<std::size_t> aug_max;
  std::size_t n = 200;
  std::uint64_t seed = 0;

  void validate() const;
  double mode_probability() const {
    return mode == AugmentMode::kSynonymReplacement ? p_replace : p_swap;
  }
};

// ceil(p * token_count) clamped to [aug_min, aug_max] (no upper clamp when
// aug_max is absent). p is the probability of the configured mode.
std::size_t target_edit_count(std::size_t token_count, const AugmentConfig& config);

enum class EditOutcome { kEdited, kNoCandidate, kGateDeclined, kTooShort };

struct SentenceEdit {
  std::vector<std::string> tokens;
  EditOutcome outcome = EditOutcome::kNoCandidate;
};

// Picks one token uniformly; if it has synonyms, replaces it (with probability
// gate) by a uniformly chosen synonym. Token count never changes.
SentenceEdit synonym_replace_sentence(std::vector<std::string> tokens,
                                      const SynonymLexicon& lexicon, Rng& rng,
                                      double gate = 1.0);

// Replacement at a fixed position; exposed for deterministic tests.
SentenceEdit replace_token_at(std::vector<std::string> tokens, std::size_t index,
                              const SynonymLexicon& lexicon, Rng& rng);

// Swaps two distinct word positions (punctuation stays put) with probability
// gate. Fewer than two word tokens yields kTooShort.
SentenceEdit random_swap_sentence(std::vector<std::string> tokens, Rng& rng,
                                  double gate = 1.0);

// Generates config.n new minority-class reports from the minority members of
// `reports` (pass the training portion only). Each sample takes a random
// minority source and applies target_edit_count single-sentence edits,
// retrying on no-op attempts up to 20x the target. Synthetic ids are
// "<source id>#aug<k>".
std::vector<Report> augment_corpus(const std::vector<Report>& reports,
                                   const LabelScheme& scheme, const AugmentConfig& config,
                                   const SynonymLexicon& lexicon);

// Applies the edit loop to one text. `edits_applied` receives the number of
// accepted edits.
std::string augment_text(std::string_view text, const AugmentConfig& config,
                         const SynonymLexicon& lexicon, Rng& rng,
                         std::size_t* edits_applied = nullptr);

}  // namespace vte
