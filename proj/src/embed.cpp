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

#include "vte/embed.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "vte/error.hpp"
#include "vte/rng.hpp"

namespace vte {
namespace {

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

}  // namespace

bool EmbeddingMatrix::all_finite() const {
  for (float v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string_view embedding_kind_name(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::kHashed:
      return "hashed";
    case EmbeddingKind::kPrecomputed:
      return "precomputed";
    case EmbeddingKind::kConstant:
      return "constant";
  }
  return "hashed";
}

EmbeddingKind parse_embedding_kind(std::string_view name) {
  if (name == "hashed") return EmbeddingKind::kHashed;
  if (name == "precomputed") return EmbeddingKind::kPrecomputed;
  if (name == "constant") return EmbeddingKind::kConstant;
  throw ValidationError("unknown embedding provider '" + std::string(name) + "'");
}

void EmbeddingProviderSpec::validate() const {
  if (dim == 0) throw ValidationError("embedding dim must be positive");
  if (kind == EmbeddingKind::kPrecomputed && path.empty()) {
    throw ValidationError("precomputed embeddings need a file path");
  }
}

HashedEmbeddingProvider::HashedEmbeddingProvider(std::size_t dim, std::uint64_t seed,
                                                 std::string pad_token)
    : dim_(dim), seed_(seed), pad_token_(std::move(pad_token)) {
  if (dim_ == 0) throw ValidationError("embedding dim must be positive");
}

std::vector<float> HashedEmbeddingProvider::token_vector(std::string_view token) const {
  std::vector<float> v(dim_, 0.0f);
  if (token == pad_token_) return v;
  Rng rng(derive_seed(seed_, fnv1a64(token)));
  std::vector<double> g(dim_);
  double norm2 = 0.0;
  for (double& x : g) {
    x = rng.normal();
    norm2 += x * x;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (std::size_t i = 0; i < dim_; ++i) v[i] = static_cast<float>(g[i] * inv);
  return v;
}

const std::vector<float>& HashedEmbeddingProvider::cached(const std::string& token) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(token);
  if (it == cache_.end()) it = cache_.emplace(token, token_vector(token)).first;
  return it->second;
}

EmbeddingMatrix HashedEmbeddingProvider::embed(const TokenSeq& seq, std::string_view) const {
  EmbeddingMatrix m(seq.tokens.size(), dim_);
  m.valid_rows = seq.valid_length();
  for (std::size_t r = 0; r < m.valid_rows; ++r) {
    const std::vector<float>& v = cached(seq.tokens[r]);
    std::copy(v.begin(), v.end(), m.row(r).begin());
  }
  return m;
}

ConstantEmbeddingProvider::ConstantEmbeddingProvider(std::size_t dim, std::string pad_token)
    : dim_(dim), pad_token_(std::move(pad_token)) {
  if (dim_ == 0) throw ValidationError("embedding dim must be positive");
}

EmbeddingMatrix ConstantEmbeddingProvider::embed(const TokenSeq& seq, std::string_view) const {
  EmbeddingMatrix m(seq.tokens.size(), dim_);
  m.valid_rows = seq.valid_length();
  const float value = static_cast<float>(1.0 / std::sqrt(static_cast<double>(dim_)));
  for (std::size_t r = 0; r < m.valid_rows; ++r) {
    std::fill(m.row(r).begin(), m.row(r).end(), value);
  }
  return m;
}

PrecomputedEmbeddingProvider::PrecomputedEmbeddingProvider(const std::filesystem::path& path,
                                                           std::size_t dim)
    : PrecomputedEmbeddingProvider(load_embedding_file(path), dim) {}

PrecomputedEmbeddingProvider::PrecomputedEmbeddingProvider(
    std::map<std::string, EmbeddingMatrix> table, std::size_t dim)
    : dim_(dim), table_(std::move(table)) {
  for (const auto& [id, m] : table_) {
    if (m.dim != dim_) {
      throw EmbeddingError("embedding for '" + id + "' has dim " + std::to_string(m.dim) +
                           ", expected " + std::to_string(dim_));
    }
  }
}

EmbeddingMatrix PrecomputedEmbeddingProvider::embed(const TokenSeq& seq,
                                                    std::string_view report_id) const {
  auto it = table_.find(std::string(report_id));
  if (it == table_.end()) {
    throw EmbeddingError("no precomputed embedding for report '" + std::string(report_id) + "'");
  }
  if (it->second.rows != seq.tokens.size()) {
    throw EmbeddingError("precomputed embedding for '" + std::string(report_id) + "' has " +
                         std::to_string(it->second.rows) + " rows, sequence has " +
                         std::to_string(seq.tokens.size()));
  }
  EmbeddingMatrix m = it->second;
  m.valid_rows = seq.valid_length();
  return m;
}

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case EmbeddingKind::kHashed:
      return std::make_unique<HashedEmbeddingProvider>(spec.dim, spec.seed, spec.pad_token);
    case EmbeddingKind::kConstant:
      return std::make_unique<ConstantEmbeddingProvider>(spec.dim, spec.pad_token);
    case EmbeddingKind::kPrecomputed:
      return std::make_unique<PrecomputedEmbeddingProvider>(spec.path, spec.dim);
  }
  throw ValidationError("unsupported embedding provider");
}

void write_embedding_record(std::ostream& out, std::string_view id, const EmbeddingMatrix& m) {
  if (id.empty() || id.find_first_of(" \t\n") != std::string_view::npos) {
    throw EmbeddingError("embedding record id must be non-empty without whitespace");
  }
  out << id << ' ' << m.rows << ' ' << m.dim << '\n';
  std::vector<std::uint32_t> words(m.data.size());
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    words[i] = to_little(std::bit_cast<std::uint32_t>(m.data[i]));
  }
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
}

std::map<std::string, EmbeddingMatrix> read_embedding_records(std::istream& in) {
  std::map<std::string, EmbeddingMatrix> table;
  std::string header;
  while (std::getline(in, header)) {
    if (header.empty()) continue;
    std::istringstream hs(header);
    std::string id;
    long long rows = -1, dim = -1;
    if (!(hs >> id >> rows >> dim) || rows < 0 || dim <= 0) {
      throw EmbeddingError("malformed embedding header '" + header + "'");
    }
    EmbeddingMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(dim));
    std::vector<std::uint32_t> words(m.data.size());
    in.read(reinterpret_cast<char*>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
    if (static_cast<std::size_t>(in.gcount()) != words.size() * sizeof(std::uint32_t)) {
      throw EmbeddingError("truncated embedding payload for '" + id + "'");
    }
    for (std::size_t i = 0; i < words.size(); ++i) {
      m.data[i] = std::bit_cast<float>(to_little(words[i]));
    }
    if (!table.emplace(id, std::move(m)).second) {
      throw EmbeddingError("duplicate embedding record '" + id + "'");
    }
  }
  return table;
}

std::map<std::string, EmbeddingMatrix> load_embedding_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embedding file " + path.string());
  return read_embedding_records(in);
}

void trim_padding(EmbeddingMatrix& m) {
  m.rows = m.valid_rows;
  m.data.resize(m.rows * m.dim);
  m.data.shrink_to_fit();
}

std::vector<EmbeddingMatrix> embed_reports(const std::vector<Report>& reports,
                                           const TokenizerConfig& tokenizer,
                                           const EmbeddingProvider& provider) {
  std::vector<EmbeddingMatrix> out;
  out.reserve(reports.size());
  for (const Report& r : reports) {
    EmbeddingMatrix m = provider.embed(tokenize(r.text, tokenizer), r.id);
    if (!m.all_finite()) throw EmbeddingError("non-finite embedding for report '" + r.id + "'");
    trim_padding(m);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace vte
