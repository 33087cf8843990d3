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

#include "vte/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vte/error.hpp"
#include "vte/rng.hpp"

namespace vte {
namespace {

using json = nlohmann::json;

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::size_t round_half_up(double x) {
  // The epsilon absorbs representation error such as 0.1 * 85 = 8.4999...
  return static_cast<std::size_t>(std::floor(x + 0.5 + 1e-9));
}

}  // namespace

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation" || name == "val") return Split::kValidation;
  if (name == "test") return Split::kTest;
  throw ParseError("unknown split '" + std::string(name) + "'");
}

void LabelScheme::validate() const {
  if (classes.size() < 2) throw ValidationError("label scheme '" + name + "' needs >= 2 classes");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].id != static_cast<int>(i)) {
      throw ValidationError("label scheme '" + name + "': class ids must be 0..k-1 in order");
    }
  }
  if (!valid_label(minority_class)) {
    throw ValidationError("label scheme '" + name + "': invalid minority class");
  }
}

LabelScheme LabelScheme::pe() { return {"pe", {{0, "No PE"}, {1, "PE"}}, 1}; }

LabelScheme LabelScheme::dvt() {
  return {"dvt",
          {{0, "No acute DVT"}, {1, "Upper extremity acute DVT"},
           {2, "Lower extremity acute DVT"}},
          1};
}

LabelScheme LabelScheme::by_name(std::string_view name) {
  if (name == "pe") return pe();
  if (name == "dvt") return dvt();
  throw ValidationError("unknown label scheme '" + std::string(name) + "'");
}

void SplitSpec::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test_fraction must lie in (0,1)");
  }
  if (!(validation_fraction_of_train > 0.0 && validation_fraction_of_train < 1.0)) {
    throw ValidationError("validation_fraction_of_train must lie in (0,1)");
  }
}

void SynthSpec::validate(const LabelScheme& scheme) const {
  scheme.validate();
  if (class_proportions.size() != scheme.classes.size()) {
    throw ValidationError("class_proportions must have one entry per class");
  }
  double sum = 0.0;
  for (double p : class_proportions) {
    if (p < 0.0) throw ValidationError("class proportions must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("class proportions must sum to 1");
  if (n_reports < class_proportions.size()) {
    throw ValidationError("n_reports must be at least the number of classes");
  }
  if (mean_length_tokens == 0) throw ValidationError("mean_length_tokens must be positive");
  if (negation_rate < 0.0 || negation_rate > 1.0) {
    throw ValidationError("negation_rate must lie in [0,1]");
  }
}

std::vector<Report> parse_corpus(std::istream& in, const LabelScheme& scheme) {
  std::vector<Report> reports;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() ||
        !rec.contains("text") || !rec["text"].is_string()) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": record needs string fields 'id' and 'text'");
    }
    Report r;
    r.id = rec["id"].get<std::string>();
    r.text = rec["text"].get<std::string>();
    if (blank(r.text)) {
      throw ValidationError("report '" + r.id + "' has empty text");
    }
    if (rec.contains("label") && !rec["label"].is_null()) {
      if (!rec["label"].is_number_integer()) {
        throw ParseError("line " + std::to_string(line_no) + ": label must be an integer");
      }
      const int label = rec["label"].get<int>();
      if (!scheme.valid_label(label)) {
        throw ValidationError("report '" + r.id + "' has label " + std::to_string(label) +
                              " outside scheme '" + scheme.name + "'");
      }
      r.label = label;
    }
    if (rec.contains("split") && !rec["split"].is_null()) {
      try {
        r.split = parse_split(rec["split"].get<std::string>());
      } catch (const std::exception& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (!seen.insert(r.id).second) {
      throw ValidationError("duplicate report id '" + r.id + "'");
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

std::vector<Report> load_corpus(const std::filesystem::path& path,
                                const LabelScheme& scheme) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  return parse_corpus(in, scheme);
}

void write_corpus(std::ostream& out, const std::vector<Report>& reports) {
  for (const Report& r : reports) {
    json rec;
    rec["id"] = r.id;
    rec["text"] = r.text;
    if (r.label) rec["label"] = *r.label;
    if (r.split) rec["split"] = std::string(split_name(*r.split));
    out << rec.dump() << '\n';
  }
}

void save_corpus(const std::filesystem::path& path, const std::vector<Report>& reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write corpus file " + path.string());
  write_corpus(out, reports);
}

std::vector<std::size_t> apportion(std::size_t n, const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> counts(weights.size(), 0);
  if (weights.empty() || total <= 0.0) return counts;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < weights.size(); ++c) {
    const double quota = static_cast<double>(n) * weights[c] / total;
    // Same epsilon as round_half_up: exact quotas must not lose a unit.
    counts[c] = static_cast<std::size_t>(std::floor(quota + 1e-9));
    assigned += counts[c];
    remainders.emplace_back(quota - static_cast<double>(counts[c]), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n && i < remainders.size(); ++i, ++assigned) {
    ++counts[remainders[i].second];
  }
  return counts;
}

std::vector<Report> split_corpus(std::vector<Report> reports, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = reports.size();
  if (n == 0) return reports;

  // Canonical order by id makes the assignment independent of input order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return reports[a].id < reports[b].id; });

  const std::size_t n_test = round_half_up(spec.test_fraction * static_cast<double>(n));
  const std::size_t n_val =
      round_half_up(spec.validation_fraction_of_train * static_cast<double>(n - n_test));

  Rng rng(derive_seed(spec.seed, 0x5711));

  if (!spec.stratified) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t i = 0; i < n; ++i) {
      Split s = i < n_test ? Split::kTest
                           : (i < n_test + n_val ? Split::kValidation : Split::kTrain);
      reports[order[i]].split = s;
    }
    return reports;
  }

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t idx : order) {
    if (!reports[idx].label) {
      throw ValidationError("stratified split needs labels; report '" + reports[idx].id +
                            "' is unlabeled");
    }
    by_class[*reports[idx].label].push_back(idx);
  }
  std::vector<double> class_sizes;
  for (auto& [label, members] : by_class) {
    if (members.size() < 3) {
      throw StratificationError("class " + std::to_string(label) + " has only " +
                                std::to_string(members.size()) +
                                " member(s); stratification needs >= 3");
    }
    rng.shuffle(members.begin(), members.end());
    class_sizes.push_back(static_cast<double>(members.size()));
  }

  const std::vector<std::size_t> test_counts = apportion(n_test, class_sizes);
  std::vector<double> remaining;
  std::size_t c = 0;
  for (const auto& [label, members] : by_class) {
    remaining.push_back(static_cast<double>(members.size() - test_counts[c++]));
  }
  const std::vector<std::size_t> val_counts = apportion(n_val, remaining);

  c = 0;
  for (const auto& [label, members] : by_class) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      Split s = i < test_counts[c] ? Split::kTest
                                   : (i < test_counts[c] + val_counts[c] ? Split::kValidation
                                                                         : Split::kTrain);
      reports[members[i]].split = s;
    }
    ++c;
  }
  return reports;
}

std::vector<Report> filter_split(const std::vector<Report>& reports, Split split) {
  std::vector<Report> out;
  for (const Report& r : reports) {
    if (r.split && *r.split == split) out.push_back(r);
  }
  return out;
}

}  // namespace vte
