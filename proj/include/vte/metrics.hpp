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

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vte/corpus.hpp"

namespace vte {

// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes = 2);
  ConfusionMatrix(std::span<const int> truths, std::span<const int> predictions, int num_classes);

  void add(int truth, int prediction);
  long long at(int truth, int prediction) const;
  int num_classes() const { return k_; }
  long long total() const { return total_; }
  long long support(int c) const;
  long long predicted(int c) const;

 private:
  int k_;
  long long total_ = 0;
  std::vector<long long> counts_;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

struct MetricsReport {
  double accuracy = 0.0;
  // Support-weighted one-vs-rest recall; equals accuracy by construction.
  double sensitivity = 0.0;
  // Support-weighted one-vs-rest true-negative rate. A class whose rest is
  // empty (every truth belongs to it) counts as 1.
  double specificity = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  std::map<int, double> per_class_auc;
  std::map<int, std::vector<RocPoint>> roc_points;
  // Classes that were never predicted; their precision is reported as 0.
  std::vector<int> zero_prediction_classes;
  ConfusionMatrix confusion;
};

MetricsReport compute_metrics(std::span<const int> truths, std::span<const int> predictions,
                              int num_classes);
MetricsReport compute_metrics(std::span<const int> truths, std::span<const int> predictions,
                              const LabelScheme& scheme);

// One-vs-rest ROC for `positive_class` over distinct score thresholds,
// starting at (0,0) and ending at (1,1); AUC by the trapezoidal rule.
RocCurve roc_curve(std::span<const int> truths, std::span<const double> scores, int positive_class);

// Adds per-class ROC curves and AUCs from a per-report probability matrix.
// Classes absent from (or filling) the truths are skipped.
void attach_roc(MetricsReport& report, std::span<const int> truths,
                const std::vector<std::vector<double>>& probabilities);

// Value of a named metric: accuracy, sensitivity, specificity,
// weighted_precision, weighted_recall, weighted_f1.
double metric_value(const MetricsReport& report, const std::string& name);
bool is_metric_name(const std::string& name);

using NamedReport = std::pair<std::string, MetricsReport>;

// Method | Accuracy | Sensitivity | Specificity | Precision | Recall | F1,
// three decimals.
std::string render_table(const std::vector<NamedReport>& reports);
// Same columns with round-trip precision.
std::string render_csv(const std::vector<NamedReport>& reports);
// Inverse of render_csv: method name and the six values in column order.
std::vector<std::pair<std::string, std::vector<double>>> parse_metrics_csv(const std::string& csv);
// method,class,fpr,tpr rows.
std::string render_roc_csv(const std::vector<NamedReport>& reports);

}  // namespace vte
