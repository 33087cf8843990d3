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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vte {

enum class Split { kTrain, kValidation, kTest };

std::string_view split_name(Split split);
Split parse_split(std::string_view name);

struct Report {
  std::string id;
  std::string text;
  std::optional<int> label;
  std::optional<Split> split;
};

struct ClassInfo {
  int id = 0;
  std::string name;
};

struct LabelScheme {
  std::string name;
  std::vector<ClassInfo> classes;
  int minority_class = 0;

  int num_classes() const { return static_cast<int>(classes.size()); }
  bool valid_label(int label) const { return label >= 0 && label < num_classes(); }

  // Throws ValidationError unless ids are 0..k-1 in order and minority is valid.
  void validate() const;

  // Binary CT-angiography task: 0 = no PE, 1 = PE.
  static LabelScheme pe();
  // Three-class ultrasound task: 0 = no acute DVT, 1 = upper, 2 = lower extremity.
  static LabelScheme dvt();
  static LabelScheme by_name(std::string_view name);
};

struct SplitSpec {
  double test_fraction = 0.2;
  double validation_fraction_of_train = 0.1;
  std::uint64_t seed = 0;
  bool stratified = true;

  void validate() const;
};

struct SynthSpec {
  std::size_t n_reports = 900;
  std::vector<double> class_proportions{0.88, 0.12};
  std::size_t mean_length_tokens = 60;
  // Chance that any report carries a negated finding sentence, and that a
  // filler sentence is phrased as a negative.
  double negation_rate = 0.5;
  std::uint64_t seed = 0;

  void validate(const LabelScheme& scheme) const;
};

// Line-delimited JSON: {"id": ..., "text": ..., "label": ..., "split": ...}.
// label and split are optional. Blank lines are skipped.
std::vector<Report> parse_corpus(std::istream& in, const LabelScheme& scheme);
std::vector<Report> load_corpus(const std::filesystem::path& path,
                                const LabelScheme& scheme);
void write_corpus(std::ostream& out, const std::vector<Report>& reports);
void save_corpus(const std::filesystem::path& path, const std::vector<Report>& reports);

// Returns the reports (same order) with split assigned. Sizes: test is
// round-half-up(test_fraction * N); validation is round-half-up of its fraction
// of the remainder. Stratified allocation uses largest remainders per class.
std::vector<Report> split_corpus(std::vector<Report> reports, const SplitSpec& spec);

std::vector<Report> filter_split(const std::vector<Report>& reports, Split split);

// Template-driven reports for desk-scale experiments. Positive-class reports
// always contain an un-negated finding sentence; negative reports only carry
// negated findings.
std::vector<Report> generate_synthetic(const SynthSpec& spec, const LabelScheme& scheme);

// Per-class counts for n items under the given proportions (largest
// remainder, ties toward lower class id).
std::vector<std::size_t> apportion(std::size_t n, const std::vector<double>& weights);

}  // namespace vte
