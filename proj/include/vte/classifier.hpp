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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vte/embed.hpp"
#include "vte/metrics.hpp"

namespace vte {

enum class ClassifierKind { kBiLstm, kLstm, kLinear };

std::string_view classifier_kind_name(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view name);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::kBiLstm;
  std::size_t input_dim = kEmbeddingDim;
  std::size_t hidden_size = 256;
  std::size_t num_layers = 2;
  std::size_t num_classes = 2;

  void validate() const;
  std::size_t directions() const { return kind == ClassifierKind::kBiLstm ? 2 : 1; }
  bool operator==(const ClassifierSpec&) const = default;
};

struct Tensor {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// Named tensors in a fixed order. Recurrent layers use, per layer l and
// direction d in {fwd, bwd}: "l<l>.<d>.w_x" (4H x in), "l<l>.<d>.w_h" (4H x H)
// and "l<l>.<d>.b" (4H x 1), gate rows ordered input, forget, cell, output;
// then "head.w" (k x H*dirs) and "head.b". The linear model has "fc1.w",
// "fc1.b", "fc2.w", "fc2.b".
struct ModelParams {
  ClassifierSpec spec;
  std::vector<Tensor> tensors;

  Tensor& get(std::string_view name);
  const Tensor& get(std::string_view name) const;
  std::size_t parameter_count() const;
  bool all_finite() const;
  bool operator==(const ModelParams& other) const;
};

// All-zero parameters with the spec's shapes.
ModelParams zero_params(const ClassifierSpec& spec);

// Uniform(-1/sqrt(H), 1/sqrt(H)) weights, forget-gate bias +1.
ModelParams init_params(const ClassifierSpec& spec, std::uint64_t seed);

struct Prediction {
  std::vector<double> probabilities;
  int predicted_class = 0;
};

// Softmax with the lowest index winning ties.
Prediction make_prediction(std::span<const double> logits);

// Top-layer features fed to the head: [h_fwd(last), h_bwd(first)] for the
// Bi-LSTM, h(last) for the LSTM, tanh(fc1 . mean(x)) for the linear model.
// Padding rows (index >= x.valid_rows) are ignored.
std::vector<double> encode(const ModelParams& params, const EmbeddingMatrix& x);
std::vector<double> logits(const ModelParams& params, const EmbeddingMatrix& x);
Prediction forward(const ModelParams& params, const EmbeddingMatrix& x);

struct Example {
  const EmbeddingMatrix* x = nullptr;
  int label = 0;
};

inline constexpr double kProbabilityFloor = 1e-12;

// Mean negative log-likelihood with probabilities floored at 1e-12.
double loss(const ModelParams& params, std::span<const Example> batch);

struct LossAndGradient {
  double loss = 0.0;
  ModelParams gradient;
};

// Analytic gradient of loss() by backpropagation through time.
LossAndGradient gradient(const ModelParams& params, std::span<const Example> batch);

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 10;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  // Epochs without validation-F1 improvement before stopping; 0 disables.
  std::size_t early_stop_patience = 0;
  double clip_norm = 5.0;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_accuracy = 0.0;
  double validation_weighted_f1 = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
};

// Mini-batch gradient descent with a per-seed shuffle each epoch and
// global-norm clipping. Returns the parameters from the epoch with the best
// validation weighted F1 (earliest wins ties).
TrainResult train(const ClassifierSpec& spec, std::span<const Example> train_set,
                  std::span<const Example> validation_set, const TrainConfig& config);

// Same, starting from given parameters.
TrainResult train_from(ModelParams initial, std::span<const Example> train_set,
                       std::span<const Example> validation_set, const TrainConfig& config);

struct Evaluation {
  std::vector<int> truths;
  std::vector<Prediction> predictions;
  MetricsReport metrics;

  std::vector<int> predicted_classes() const;
  std::vector<std::vector<double>> probabilities() const;
};

// Forward pass over every example; metrics include per-class ROC where the
// truths contain both sides.
Evaluation evaluate(const ModelParams& params, std::span<const Example> examples);

// Binary model file: magic "VTEMODEL", u32 version, u32 metadata length,
// metadata JSON (spec fields plus caller-supplied pipeline settings), then per
// tensor its name, shape and little-endian float64 values.
void write_model(std::ostream& out, const ModelParams& params, std::string_view metadata_json = "{}");
ModelParams read_model(std::istream& in, std::string* metadata_json = nullptr);
void save_model(const std::filesystem::path& path, const ModelParams& params,
                std::string_view metadata_json = "{}");
ModelParams load_model(const std::filesystem::path& path, std::string* metadata_json = nullptr);

}  // namespace vte
