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

#include "vte/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "vte/error.hpp"

namespace vte {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || u >= 0x80;
}

// Lowercased forms, without the trailing period.
constexpr std::array<std::string_view, 12> kAbbreviations{
    "dr", "mr", "mrs", "ms", "st", "vs", "approx", "e.g", "i.e", "fig", "resp", "min"};

bool ends_with_abbreviation(std::string_view text, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0 && !is_space(text[start - 1])) --start;
  std::string word(text.substr(start, dot - start));
  for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  while (!word.empty() && (word.front() == '(' || word.front() == '"')) word.erase(0, 1);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
}

}  // namespace

void TokenizerConfig::validate() const {
  if (max_len < 2) throw ValidationError("tokenizer max_len must be >= 2");
  if (pad_token.empty() || cls_token.empty() || pad_token == cls_token) {
    throw ValidationError("tokenizer needs distinct non-empty pad and cls tokens");
  }
}

TokenizerConfig TokenizerConfig::dvt() {
  TokenizerConfig c;
  c.max_len = 170;
  c.truncate_side = TruncateSide::kRight;
  return c;
}

TokenizerConfig TokenizerConfig::pe() {
  TokenizerConfig c;
  c.max_len = 512;
  c.truncate_side = TruncateSide::kLeft;
  return c;
}

TokenizerConfig TokenizerConfig::by_preset(std::string_view name) {
  if (name == "dvt") return dvt();
  if (name == "pe") return pe();
  throw ValidationError("unknown tokenizer preset '" + std::string(name) + "'");
}

std::vector<TextSpan> sentence_spans(std::string_view text) {
  std::vector<TextSpan> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::size_t b = start, e = end;
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    if (b < e) out.push_back({b, e});
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      emit(i + 1);
      continue;
    }
    if (c != '.' && c != '!' && c != '?') continue;
    // Runs such as "?!" or "..." end together.
    std::size_t j = i;
    while (j + 1 < text.size() && (text[j + 1] == '.' || text[j + 1] == '!' || text[j + 1] == '?')) {
      ++j;
    }
    const bool at_end = j + 1 >= text.size();
    if (!at_end && !is_space(text[j + 1])) {
      i = j;
      continue;
    }
    if (c == '.' && j == i && ends_with_abbreviation(text, i)) {
      i = j;
      continue;
    }
    emit(j + 1);
    i = j;
  }
  emit(text.size());
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  for (const TextSpan& span : sentence_spans(text)) {
    out.emplace_back(text.substr(span.begin, span.end - span.begin));
  }
  return out;
}

std::vector<std::string> word_tokenize(std::string_view text, bool lowercase) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (is_space(c)) {
      flush();
    } else if (is_word_char(c)) {
      current += lowercase ? static_cast<char>(std::tolower(static_cast<unsigned char>(c))) : c;
    } else if ((c == '.' || c == ',') && !current.empty() && is_digit(current.back()) &&
               i + 1 < text.size() && is_digit(text[i + 1])) {
      current += c;
    } else {
      flush();
      tokens.emplace_back(1, c);
    }
  }
  flush();
  return tokens;
}

bool is_word_token(std::string_view token) {
  return !token.empty() && std::any_of(token.begin(), token.end(), is_word_char);
}

std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  bool glue_next = true;
  for (const std::string& t : tokens) {
    // "-" and "/" glue on both sides so "d-dimer" and "and/or" stay compact.
    const bool joiner = t == "-" || t == "/";
    const bool closing =
        t.size() == 1 && std::string_view(".,;:!?)]%").find(t[0]) != std::string_view::npos;
    if (!glue_next && !closing && !joiner) out += ' ';
    out += t;
    glue_next = t == "(" || t == "[" || joiner;
  }
  return out;
}

TokenSeq tokenize(std::string_view text, const TokenizerConfig& config) {
  config.validate();
  std::vector<std::string> content = word_tokenize(text, config.lowercase);
  TokenSeq seq;
  seq.original_length = content.size();
  const std::size_t budget = config.max_len - 1;
  if (content.size() > budget) {
    if (config.truncate_side == TruncateSide::kLeft) {
      content.erase(content.begin(), content.end() - static_cast<std::ptrdiff_t>(budget));
    } else {
      content.resize(budget);
    }
  }
  seq.tokens.reserve(config.max_len);
  seq.tokens.push_back(config.cls_token);
  seq.tokens.insert(seq.tokens.end(), std::make_move_iterator(content.begin()),
                    std::make_move_iterator(content.end()));
  seq.pad_length = config.max_len - seq.tokens.size();
  seq.tokens.resize(config.max_len, config.pad_token);
  seq.cls_present = true;
  return seq;
}

}  // namespace vte
