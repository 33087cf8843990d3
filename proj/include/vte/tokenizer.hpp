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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vte {

enum class TruncateSide { kLeft, kRight };

struct TokenizerConfig {
  std::size_t max_len = 512;
  // kLeft drops tokens from the start and keeps the end of the report.
  TruncateSide truncate_side = TruncateSide::kLeft;
  bool lowercase = true;
  std::string pad_token = "[PAD]";
  std::string cls_token = "[CLS]";

  void validate() const;

  // Short structured ultrasound reports: 170 tokens, cut on the right.
  static TokenizerConfig dvt();
  // Long CT reports: 512 tokens, cut on the left since impressions come last.
  static TokenizerConfig pe();
  static TokenizerConfig by_preset(std::string_view name);
};

struct TokenSeq {
  std::vector<std::string> tokens;
  bool cls_present = true;
  // Content tokens before truncation (classification token not counted).
  std::size_t original_length = 0;
  std::size_t pad_length = 0;

  // Rows that carry real content, including the classification slot.
  std::size_t valid_length() const { return tokens.size() - pad_length; }
};

// Sentence boundaries are '.', '!', '?' followed by whitespace or end of text,
// and newlines. Decimal numbers and a short list of abbreviations (Dr., vs.,
// e.g.) do not end a sentence. Returned sentences are whitespace-trimmed and
// keep their terminal punctuation.
std::vector<std::string> split_sentences(std::string_view text);

struct TextSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Offsets of the sentences returned by split_sentences, in the same order.
std::vector<TextSpan> sentence_spans(std::string_view text);

// Words are runs of letters, digits and non-ASCII bytes; a '.' or ',' between
// digits stays inside the number; every other punctuation byte is a token.
std::vector<std::string> word_tokenize(std::string_view text, bool lowercase);

// Rejoins tokens with single spaces, without a space before closing
// punctuation or after an opening bracket.
std::string detokenize(const std::vector<std::string>& tokens);

bool is_word_token(std::string_view token);

TokenSeq tokenize(std::string_view text, const TokenizerConfig& config);

}  // namespace vte
