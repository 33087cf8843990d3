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

#include "vte/augment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "demo_assets.hpp"
#include "vte/error.hpp"
#include "vte/tokenizer.hpp"

namespace vte {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool single_word(std::string_view s) {
  const auto toks = word_tokenize(s, false);
  return toks.size() == 1 && is_word_token(toks[0]);
}

// Carries the capitalization of the first letter over to the replacement.
std::string match_case(std::string_view original, std::string replacement) {
  if (!original.empty() && std::isupper(static_cast<unsigned char>(original[0])) &&
      !replacement.empty()) {
    replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
  }
  return replacement;
}

}  // namespace

void SynonymLexicon::add(std::string_view word, const std::vector<std::string>& synonyms) {
  const std::string key = lower(word);
  std::vector<std::string>& list = entries_[key];
  for (const std::string& syn : synonyms) {
    const std::string s = lower(trim(syn));
    if (s.empty() || s == key) continue;
    if (std::find(list.begin(), list.end(), s) == list.end()) list.push_back(s);
  }
  if (list.empty()) entries_.erase(key);
}

const std::vector<std::string>* SynonymLexicon::lookup(std::string_view word) const {
  auto it = entries_.find(lower(word));
  return it == entries_.end() ? nullptr : &it->second;
}

SynonymLexicon SynonymLexicon::parse_tsv(std::istream& in) {
  SynonymLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto tab = t.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("lexicon line " + std::to_string(line_no) + ": expected word<TAB>synonyms");
    }
    const std::string word = trim(t.substr(0, tab));
    if (!single_word(word)) {
      throw ParseError("lexicon line " + std::to_string(line_no) + ": '" + word +
                       "' is not a single word");
    }
    std::vector<std::string> syns;
    std::stringstream ss(t.substr(tab + 1));
    std::string item;
    while (std::getline(ss, item, '|')) {
      item = trim(item);
      if (item.empty()) continue;
      if (!single_word(item)) {
        throw ParseError("lexicon line " + std::to_string(line_no) + ": synonym '" + item +
                         "' is not a single word");
      }
      syns.push_back(item);
    }
    lex.add(word, syns);
  }
  return lex;
}

SynonymLexicon SynonymLexicon::load_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon " + path.string());
  return parse_tsv(in);
}

SynonymLexicon SynonymLexicon::demo_clinical() {
  std::istringstream in{std::string(assets::kClinicalSynonyms)};
  return parse_tsv(in);
}

SynonymLexicon SynonymLexicon::parse_ppdb(std::istream& in) {
  SynonymLexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const auto sep = line.find("|||", pos);
      fields.push_back(trim(line.substr(pos, sep == std::string::npos ? std::string::npos : sep - pos)));
      if (sep == std::string::npos) break;
      pos = sep + 3;
    }
    if (fields.size() < 3) continue;
    if (single_word(fields[1]) && single_word(fields[2])) lex.add(fields[1], {fields[2]});
  }
  return lex;
}

std::string_view augment_mode_name(AugmentMode mode) {
  return mode == AugmentMode::kSynonymReplacement ? "synonym" : "swap";
}

AugmentMode parse_augment_mode(std::string_view name) {
  if (name == "synonym" || name == "synonym_replacement") return AugmentMode::kSynonymReplacement;
  if (name == "swap" || name == "random_swapping") return AugmentMode::kRandomSwapping;
  throw ValidationError("unknown augmentation mode '" + std::string(name) + "'");
}

void AugmentConfig::validate() const {
  if (p_replace < 0.0 || p_replace > 1.0 || p_swap < 0.0 || p_swap > 1.0) {
    throw ValidationError("augmentation probabilities must lie in [0,1]");
  }
  if (aug_min < 1) throw ValidationError("aug_min must be >= 1");
  if (aug_max && *aug_max < aug_min) throw ValidationError("aug_max must be >= aug_min");
}

std::size_t target_edit_count(std::size_t token_count, const AugmentConfig& config) {
  const double raw = std::ceil(config.mode_probability() * static_cast<double>(token_count) - 1e-9);
  std::size_t count = raw <= 0.0 ? 0 : static_cast<std::size_t>(raw);
  count = std::max(count, config.aug_min);
  if (config.aug_max) count = std::min(count, *config.aug_max);
  return count;
}

SentenceEdit replace_token_at(std::vector<std::string> tokens, std::size_t index,
                              const SynonymLexicon& lexicon, Rng& rng) {
  SentenceEdit edit;
  const std::vector<std::string>* syns = index < tokens.size() ? lexicon.lookup(tokens[index]) : nullptr;
  if (syns == nullptr) {
    edit.tokens = std::move(tokens);
    edit.outcome = EditOutcome::kNoCandidate;
    return edit;
  }
  tokens[index] = match_case(tokens[index], (*syns)[rng.index(syns->size())]);
  edit.tokens = std::move(tokens);
  edit.outcome = EditOutcome::kEdited;
  return edit;
}

SentenceEdit synonym_replace_sentence(std::vector<std::string> tokens,
                                      const SynonymLexicon& lexicon, Rng& rng, double gate) {
  if (tokens.empty()) return {std::move(tokens), EditOutcome::kTooShort};
  const std::size_t index = rng.index(tokens.size());
  if (lexicon.lookup(tokens[index]) == nullptr) {
    return {std::move(tokens), EditOutcome::kNoCandidate};
  }
  if (!rng.bernoulli(gate)) return {std::move(tokens), EditOutcome::kGateDeclined};
  return replace_token_at(std::move(tokens), index, lexicon, rng);
}

SentenceEdit random_swap_sentence(std::vector<std::string> tokens, Rng& rng, double gate) {
  std::vector<std::size_t> words;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (is_word_token(tokens[i])) words.push_back(i);
  }
  if (words.size() < 2) return {std::move(tokens), EditOutcome::kTooShort};
  const std::size_t a = rng.index(words.size());
  std::size_t b = rng.index(words.size() - 1);
  if (b >= a) ++b;
  if (!rng.bernoulli(gate)) return {std::move(tokens), EditOutcome::kGateDeclined};
  std::swap(tokens[words[a]], tokens[words[b]]);
  return {std::move(tokens), EditOutcome::kEdited};
}

std::string augment_text(std::string_view text, const AugmentConfig& config,
                         const SynonymLexicon& lexicon, Rng& rng, std::size_t* edits_applied) {
  const std::vector<TextSpan> spans = sentence_spans(text);
  std::vector<std::string> sentences;
  for (const TextSpan& s : spans) sentences.emplace_back(text.substr(s.begin, s.end - s.begin));

  std::size_t edits = 0;
  if (!sentences.empty()) {
    const std::size_t target = target_edit_count(word_tokenize(text, false).size(), config);
    const std::size_t max_attempts = 20 * target;
    for (std::size_t attempt = 0; attempt < max_attempts && edits < target; ++attempt) {
      const std::size_t si = rng.index(sentences.size());
      SentenceEdit edit =
          config.mode == AugmentMode::kSynonymReplacement
              ? synonym_replace_sentence(word_tokenize(sentences[si], false), lexicon, rng,
                                         config.p_replace)
              : random_swap_sentence(word_tokenize(sentences[si], false), rng, config.p_swap);
      if (edit.outcome != EditOutcome::kEdited) continue;
      sentences[si] = detokenize(edit.tokens);
      ++edits;
    }
  }
  if (edits_applied != nullptr) *edits_applied = edits;

  // Splice edited sentences back so inter-sentence whitespace survives.
  std::string out;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    out.append(text.substr(cursor, spans[i].begin - cursor));
    out += sentences[i];
    cursor = spans[i].end;
  }
  out.append(text.substr(cursor));
  return out;
}

std::vector<Report> augment_corpus(const std::vector<Report>& reports,
                                   const LabelScheme& scheme, const AugmentConfig& config,
                                   const SynonymLexicon& lexicon) {
  config.validate();
  if (config.n == 0) return {};
  std::vector<const Report*> minority;
  for (const Report& r : reports) {
    if (r.label && *r.label == scheme.minority_class) minority.push_back(&r);
  }
  if (minority.empty()) {
    throw AugmentationError("no reports of minority class " +
                            std::to_string(scheme.minority_class) + " to augment");
  }
  std::vector<Report> out;
  out.reserve(config.n);
  for (std::size_t k = 0; k < config.n; ++k) {
    // Per-sample streams keep each output independent of how many draws the
    // previous samples consumed.
    Rng rng(derive_seed(config.seed, k));
    const Report& source = *minority[rng.index(minority.size())];
    Report r;
    r.id = source.id + "#aug" + std::to_string(k);
    r.text = augment_text(source.text, config, lexicon, rng);
    r.label = scheme.minority_class;
    r.split = source.split;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace vte
