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

#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "vte/embed.hpp"
#include "vte/error.hpp"

using namespace vte;
using vte::test::contains;

namespace {

double norm(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += static_cast<double>(a[i]) * b[i];
  return dot / (norm(a) * norm(b));
}

}  // namespace

TEST_CASE("hashed embeddings") {
  const HashedEmbeddingProvider p(kEmbeddingDim, 13);
  TokenizerConfig cfg;
  cfg.max_len = 8;
  const TokenSeq seq = tokenize("Acute clot seen", cfg);

  SUBCASE("deterministic across calls and instances") {
    const auto a = p.embed(seq, "x");
    const auto b = p.embed(seq, "y");
    const auto c = HashedEmbeddingProvider(kEmbeddingDim, 13).embed(seq, "x");
    CHECK(a.data == b.data);
    CHECK(a.data == c.data);
    CHECK(p.token_vector("clot") == p.token_vector("clot"));
  }
  SUBCASE("unit rows and zero padding") {
    const auto m = p.embed(seq, "x");
    CHECK(m.rows == 8);
    CHECK(m.valid_rows == 4);
    for (std::size_t r = 0; r < m.valid_rows; ++r) CHECK(std::abs(norm(m.row(r)) - 1.0) <= 1e-6);
    for (std::size_t r = m.valid_rows; r < m.rows; ++r) CHECK(norm(m.row(r)) == 0.0);
  }
  SUBCASE("seed changes vectors") {
    CHECK(p.token_vector("clot") != HashedEmbeddingProvider(kEmbeddingDim, 14).token_vector("clot"));
  }
  SUBCASE("distinct tokens are nearly orthogonal") {
    std::vector<std::vector<float>> vecs;
    for (int i = 0; i < 10000; ++i) vecs.push_back(p.token_vector("tok" + std::to_string(i)));
    Rng rng(3);
    int ok = 0;
    const int pairs = 10000;
    for (int i = 0; i < pairs; ++i) {
      const std::size_t a = rng.index(vecs.size());
      std::size_t b = rng.index(vecs.size() - 1);
      if (b >= a) ++b;
      if (std::abs(cosine(vecs[a], vecs[b])) < 0.5) ++ok;
    }
    CHECK(static_cast<double>(ok) / pairs >= 0.99);
  }
}

TEST_CASE("constant provider collapses tokens") {
  const ConstantEmbeddingProvider p(16);
  TokenizerConfig cfg;
  cfg.max_len = 6;
  const auto m = p.embed(tokenize("a b c", cfg), "x");
  for (std::size_t r = 1; r < m.valid_rows; ++r) {
    for (std::size_t d = 0; d < m.dim; ++d) CHECK(m.row(r)[d] == m.row(0)[d]);
  }
  for (std::size_t r = m.valid_rows; r < m.rows; ++r) CHECK(norm(m.row(r)) == 0.0);
}

TEST_CASE("precomputed embeddings") {
  TokenizerConfig cfg;
  cfg.max_len = 4;
  const TokenSeq seq = tokenize("clot", cfg);
  Rng rng(9);
  EmbeddingMatrix m(4, 5);
  for (float& x : m.data) x = static_cast<float>(rng.normal());
  m.data[3] = 1e-30f;  // denormal-adjacent values survive

  std::stringstream buf;
  write_embedding_record(buf, "r1", m);
  write_embedding_record(buf, "r2", m);
  const auto table = read_embedding_records(buf);
  REQUIRE(table.size() == 2);
  CHECK(table.at("r1").data == m.data);  // bit-exact

  const PrecomputedEmbeddingProvider p(table, 5);
  CHECK(p.embed(seq, "r2").data == m.data);
  CHECK(p.embed(seq, "r2").valid_rows == 2);
  try {
    (void)p.embed(seq, "missing-42");
    FAIL("expected an embedding error");
  } catch (const EmbeddingError& e) {
    CHECK(contains(e.what(), "missing-42"));
  }
  CHECK_THROWS_AS(PrecomputedEmbeddingProvider(table, 6), EmbeddingError);
  TokenizerConfig longer;
  longer.max_len = 5;
  CHECK_THROWS_AS((void)p.embed(tokenize("clot", longer), "r1"), EmbeddingError);

  std::stringstream trunc;
  write_embedding_record(trunc, "r1", m);
  std::string bytes = trunc.str();
  bytes.resize(bytes.size() - 3);
  std::istringstream short_in(bytes);
  CHECK_THROWS_AS(read_embedding_records(short_in), EmbeddingError);
}

TEST_CASE("trim padding and batch embedding") {
  const HashedEmbeddingProvider p(12, 1);
  TokenizerConfig cfg;
  cfg.max_len = 10;
  const auto full = p.embed(tokenize("one two", cfg), "x");
  auto trimmed = full;
  trim_padding(trimmed);
  CHECK(trimmed.rows == 3);
  CHECK(trimmed.valid_rows == 3);
  CHECK(trimmed.data.size() == 36);
  for (std::size_t i = 0; i < trimmed.data.size(); ++i) CHECK(trimmed.data[i] == full.data[i]);

  const auto batch = embed_reports(test::labelled({0, 1, 0}), cfg, p);
  REQUIRE(batch.size() == 3);
  for (const auto& e : batch) CHECK(e.rows == e.valid_rows);

  EmbeddingMatrix bad(1, 2);
  bad.data[0] = std::numeric_limits<float>::quiet_NaN();
  CHECK_FALSE(bad.all_finite());
}

TEST_CASE("embedding spec") {
  EmbeddingProviderSpec s;
  s.kind = EmbeddingKind::kPrecomputed;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  CHECK(parse_embedding_kind("constant") == EmbeddingKind::kConstant);
  CHECK_THROWS_AS(parse_embedding_kind("bert"), ValidationError);
}
