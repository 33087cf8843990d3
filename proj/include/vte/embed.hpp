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
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vte/corpus.hpp"
#include "vte/tokenizer.hpp"

namespace vte {

inline constexpr std::size_t kEmbeddingDim = 768;

// Row-major seq_len x dim matrix. Rows at or beyond valid_rows are padding.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::size_t valid_rows = 0;
  std::vector<float> data;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows_, std::size_t dim_)
      : rows(rows_), dim(dim_), valid_rows(rows_), data(rows_ * dim_, 0.0f) {}

  std::span<float> row(std::size_t r) { return {data.data() + r * dim, dim}; }
  std::span<const float> row(std::size_t r) const { return {data.data() + r * dim, dim}; }
  bool all_finite() const;
};

enum class EmbeddingKind { kHashed, kPrecomputed, kConstant };

std::string_view embedding_kind_name(EmbeddingKind kind);
EmbeddingKind parse_embedding_kind(std::string_view name);

struct EmbeddingProviderSpec {
  EmbeddingKind kind = EmbeddingKind::kHashed;
  std::size_t dim = kEmbeddingDim;
  std::uint64_t seed = 13;
  std::filesystem::path path;  // precomputed only
  std::string pad_token = "[PAD]";

  void validate() const;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  // report_id is only consulted by providers keyed on reports.
  virtual EmbeddingMatrix embed(const TokenSeq& seq, std::string_view report_id) const = 0;
};

// Each distinct token maps to a unit vector drawn from a generator seeded by
// hash(token) and the provider seed; the pad token maps to zeros.
class HashedEmbeddingProvider final : public EmbeddingProvider {
 public:
  HashedEmbeddingProvider(std::size_t dim, std::uint64_t seed, std::string pad_token = "[PAD]");
  std::size_t dim() const override { return dim_; }
  EmbeddingMatrix embed(const TokenSeq& seq, std::string_view report_id) const override;

  // Unit vector for one token, computed without the cache.
  std::vector<float> token_vector(std::string_view token) const;

 private:
  const std::vector<float>& cached(const std::string& token) const;

  std::size_t dim_;
  std::uint64_t seed_;
  std::string pad_token_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, std::vector<float>> cache_;
};

// Degenerate provider: every non-pad token gets the same vector. Useful as a
// known-worse baseline in model selection.
class ConstantEmbeddingProvider final : public EmbeddingProvider {
 public:
  ConstantEmbeddingProvider(std::size_t dim, std::string pad_token = "[PAD]");
  std::size_t dim() const override { return dim_; }
  EmbeddingMatrix embed(const TokenSeq& seq, std::string_view report_id) const override;

 private:
  std::size_t dim_;
  std::string pad_token_;
};

// Matrices exported by an external model, keyed by report id.
class PrecomputedEmbeddingProvider final : public EmbeddingProvider {
 public:
  PrecomputedEmbeddingProvider(const std::filesystem::path& path, std::size_t dim);
  explicit PrecomputedEmbeddingProvider(std::map<std::string, EmbeddingMatrix> table,
                                        std::size_t dim);
  std::size_t dim() const override { return dim_; }
  EmbeddingMatrix embed(const TokenSeq& seq, std::string_view report_id) const override;

 private:
  std::size_t dim_;
  std::map<std::string, EmbeddingMatrix> table_;
};

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderSpec& spec);

// Record format: text header line "id rows dim\n" then rows*dim little-endian
// float32 values. Files hold any number of consecutive records.
void write_embedding_record(std::ostream& out, std::string_view id, const EmbeddingMatrix& m);
std::map<std::string, EmbeddingMatrix> read_embedding_records(std::istream& in);
std::map<std::string, EmbeddingMatrix> load_embedding_file(const std::filesystem::path& path);

// Drops the padding rows. Classifiers never read them, and a 512-row padded
// matrix costs 1.5 MB per report.
void trim_padding(EmbeddingMatrix& m);

// Tokenize then embed each report, padding trimmed, in input order.
std::vector<EmbeddingMatrix> embed_reports(const std::vector<Report>& reports,
                                           const TokenizerConfig& tokenizer,
                                           const EmbeddingProvider& provider);

}  // namespace vte
