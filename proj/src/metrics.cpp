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

#include "vte/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "vte/error.hpp"

namespace vte {
namespace {

const char* const kColumns[] = {"accuracy",           "sensitivity",     "specificity",
                                "weighted_precision", "weighted_recall", "weighted_f1"};
const char* const kHeaders[] = {"Accuracy", "Sensitivity", "Specificity",
                                "Precision", "Recall",      "F1"};

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : k_(num_classes), counts_(static_cast<std::size_t>(num_classes * num_classes), 0) {
  if (num_classes < 1) throw MetricsError("confusion matrix needs at least one class");
}

ConfusionMatrix::ConfusionMatrix(std::span<const int> truths, std::span<const int> predictions,
                                 int num_classes)
    : ConfusionMatrix(num_classes) {
  if (truths.size() != predictions.size()) {
    throw MetricsError("truths and predictions differ in length (" + std::to_string(truths.size()) +
                       " vs " + std::to_string(predictions.size()) + ")");
  }
  for (std::size_t i = 0; i < truths.size(); ++i) add(truths[i], predictions[i]);
}

void ConfusionMatrix::add(int truth, int prediction) {
  if (truth < 0 || truth >= k_ || prediction < 0 || prediction >= k_) {
    throw MetricsError("label out of range for confusion matrix");
  }
  ++counts_[static_cast<std::size_t>(truth * k_ + prediction)];
  ++total_;
}

long long ConfusionMatrix::at(int truth, int prediction) const {
  return counts_[static_cast<std::size_t>(truth * k_ + prediction)];
}

long long ConfusionMatrix::support(int c) const {
  long long s = 0;
  for (int p = 0; p < k_; ++p) s += at(c, p);
  return s;
}

long long ConfusionMatrix::predicted(int c) const {
  long long s = 0;
  for (int t = 0; t < k_; ++t) s += at(t, c);
  return s;
}

MetricsReport compute_metrics(std::span<const int> truths, std::span<const int> predictions,
                              int num_classes) {
  if (truths.empty()) throw MetricsError("cannot compute metrics on an empty evaluation set");
  MetricsReport r;
  r.confusion = ConfusionMatrix(truths, predictions, num_classes);
  const ConfusionMatrix& cm = r.confusion;
  const auto n = static_cast<double>(cm.total());
  long long correct = 0;
  for (int c = 0; c < num_classes; ++c) {
    const auto tp = static_cast<double>(cm.at(c, c));
    const auto support = static_cast<double>(cm.support(c));
    const auto pred = static_cast<double>(cm.predicted(c));
    const double fn = support - tp;
    const double fp = pred - tp;
    const double tn = n - tp - fn - fp;
    correct += cm.at(c, c);

    double precision = 0.0;
    if (pred > 0) {
      precision = tp / pred;
    } else {
      r.zero_prediction_classes.push_back(c);
    }
    const double recall = support > 0 ? tp / support : 0.0;
    const double f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    // With no negatives for this class there is nothing to mislabel.
    const double specificity = tn + fp > 0 ? tn / (tn + fp) : 1.0;
    const double w = support / n;
    r.weighted_precision += w * precision;
    r.weighted_recall += w * recall;
    r.weighted_f1 += w * f1;
    r.specificity += w * specificity;
  }
  r.accuracy = static_cast<double>(correct) / n;
  r.sensitivity = r.weighted_recall;
  return r;
}

MetricsReport compute_metrics(std::span<const int> truths, std::span<const int> predictions,
                              const LabelScheme& scheme) {
  return compute_metrics(truths, predictions, scheme.num_classes());
}

RocCurve roc_curve(std::span<const int> truths, std::span<const double> scores, int positive_class) {
  if (truths.size() != scores.size()) throw MetricsError("truths and scores differ in length");
  std::size_t pos = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (!(scores[i] >= 0.0 && scores[i] <= 1.0)) throw MetricsError("ROC scores must lie in [0,1]");
    if (truths[i] == positive_class) ++pos;
  }
  const std::size_t neg = truths.size() - pos;
  if (pos == 0 || neg == 0) {
    throw MetricsError("ROC is undefined without both positive and negative truths");
  }
  std::vector<std::size_t> order(truths.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      if (truths[order[i]] == positive_class) {
        ++tp;
      } else {
        ++fp;
      }
      ++i;
    }
    const RocPoint p{static_cast<double>(fp) / static_cast<double>(neg),
                     static_cast<double>(tp) / static_cast<double>(pos)};
    curve.auc += (p.fpr - curve.points.back().fpr) * (p.tpr + curve.points.back().tpr) / 2.0;
    curve.points.push_back(p);
  }
  return curve;
}

void attach_roc(MetricsReport& report, std::span<const int> truths,
                const std::vector<std::vector<double>>& probabilities) {
  if (probabilities.size() != truths.size()) throw MetricsError("probabilities and truths differ in length");
  if (probabilities.empty()) return;
  const std::size_t k = probabilities.front().size();
  for (std::size_t c = 0; c < k; ++c) {
    const auto cls = static_cast<int>(c);
    const auto pos = std::count(truths.begin(), truths.end(), cls);
    if (pos == 0 || pos == static_cast<long>(truths.size())) continue;
    std::vector<double> scores;
    scores.reserve(probabilities.size());
    for (const auto& p : probabilities) scores.push_back(std::clamp(p.at(c), 0.0, 1.0));
    RocCurve curve = roc_curve(truths, scores, cls);
    report.per_class_auc[cls] = curve.auc;
    report.roc_points[cls] = std::move(curve.points);
  }
}

bool is_metric_name(const std::string& name) {
  return std::find_if(std::begin(kColumns), std::end(kColumns),
                      [&](const char* c) { return name == c; }) != std::end(kColumns);
}

double metric_value(const MetricsReport& r, const std::string& name) {
  if (name == "accuracy") return r.accuracy;
  if (name == "sensitivity") return r.sensitivity;
  if (name == "specificity") return r.specificity;
  if (name == "weighted_precision") return r.weighted_precision;
  if (name == "weighted_recall") return r.weighted_recall;
  if (name == "weighted_f1") return r.weighted_f1;
  throw MetricsError("unknown metric '" + name + "'");
}

std::string render_table(const std::vector<NamedReport>& reports) {
  std::size_t width = 6;
  for (const auto& [name, r] : reports) width = std::max(width, name.size());
  std::ostringstream os;
  char buf[64];
  os << "Method" << std::string(width - 6, ' ');
  for (const char* h : kHeaders) {
    std::snprintf(buf, sizeof(buf), " | %11s", h);
    os << buf;
  }
  os << '\n' << std::string(width, '-');
  for (std::size_t i = 0; i < std::size(kHeaders); ++i) os << "-+-" << std::string(11, '-');
  os << '\n';
  for (const auto& [name, r] : reports) {
    os << name << std::string(width - name.size(), ' ');
    for (const char* col : kColumns) {
      std::snprintf(buf, sizeof(buf), " | %11.3f", metric_value(r, col));
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

std::string render_csv(const std::vector<NamedReport>& reports) {
  std::ostringstream os;
  os << "method";
  for (const char* col : kColumns) os << ',' << col;
  os << '\n';
  for (const auto& [name, r] : reports) {
    os << csv_quote(name);
    for (const char* col : kColumns) os << ',' << full_precision(metric_value(r, col));
    os << '\n';
  }
  return os.str();
}

std::vector<std::pair<std::string, std::vector<double>>> parse_metrics_csv(const std::string& csv) {
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  std::istringstream is(csv);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const std::vector<std::string> f = csv_split(line);
    if (f.size() != 1 + std::size(kColumns)) throw ParseError("metrics CSV row has wrong arity");
    std::vector<double> values;
    for (std::size_t i = 1; i < f.size(); ++i) values.push_back(std::stod(f[i]));
    rows.emplace_back(f[0], std::move(values));
  }
  return rows;
}

std::string render_roc_csv(const std::vector<NamedReport>& reports) {
  std::ostringstream os;
  os << "method,class,fpr,tpr\n";
  for (const auto& [name, r] : reports) {
    for (const auto& [cls, points] : r.roc_points) {
      for (const RocPoint& p : points) {
        os << csv_quote(name) << ',' << cls << ',' << full_precision(p.fpr) << ','
           << full_precision(p.tpr) << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace vte
