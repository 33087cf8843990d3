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

#include <cstdio>
#include <string>
#include <vector>

#include "vte/corpus.hpp"
#include "vte/embed.hpp"
#include "vte/rng.hpp"

namespace vte::test {

inline bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// Reports "r000", "r001", ... with the given labels and placeholder text.
inline std::vector<Report> labelled(const std::vector<int>& labels) {
  std::vector<Report> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "r%03zu", i);
    out.push_back({id, "report " + std::to_string(i), labels[i], std::nullopt});
  }
  return out;
}

inline EmbeddingMatrix random_matrix(std::size_t rows, std::size_t dim, Rng& rng,
                                     double scale = 1.0) {
  EmbeddingMatrix m(rows, dim);
  for (float& v : m.data) v = static_cast<float>(scale * rng.uniform(-1.0, 1.0));
  return m;
}

}  // namespace vte::test
