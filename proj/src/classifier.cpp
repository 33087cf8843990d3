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

#include "vte/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "vte/error.hpp"
#include "vte/kernels.hpp"
#include "vte/metrics.hpp"
#include "vte/rng.hpp"

namespace vte {
namespace {

using json = nlohmann::json;

// Rows per cache block when sweeping a weight matrix across all timesteps.
constexpr std::size_t kRowBlock = 32;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Z[t] += W X[t] for every t. W is R x C, X is T x C, Z is T x R.
void project(const double* w, std::size_t rows, std::size_t cols, const double* x,
             std::size_t steps, double* z) {
  const auto& k = kernels::active();
  for (std::size_t rb = 0; rb < rows; rb += kRowBlock) {
    const std::size_t n = std::min(kRowBlock, rows - rb);
    for (std::size_t t = 0; t < steps; ++t) {
      k.gemv(w + rb * cols, n, cols, x + t * cols, z + t * rows + rb);
    }
  }
}

// dW += sum_t dZ[t] X[t]^T.
void accumulate_outer(const double* dz, std::size_t rows, const double* x, std::size_t cols,
                      std::size_t steps, double* dw) {
  const auto& k = kernels::active();
  for (std::size_t rb = 0; rb < rows; rb += kRowBlock) {
    const std::size_t n = std::min(kRowBlock, rows - rb);
    for (std::size_t t = 0; t < steps; ++t) {
      k.ger(dz + t * rows + rb, n, x + t * cols, cols, dw + rb * cols);
    }
  }
}

// dX[t] += W^T dZ[t].
void back_project(const double* w, std::size_t rows, std::size_t cols, const double* dz,
                  std::size_t steps, double* dx) {
  const auto& k = kernels::active();
  for (std::size_t rb = 0; rb < rows; rb += kRowBlock) {
    const std::size_t n = std::min(kRowBlock, rows - rb);
    for (std::size_t t = 0; t < steps; ++t) {
      k.gemv_t(w + rb * cols, n, cols, dz + t * rows + rb, dx + t * cols);
    }
  }
}

std::string dir_name(std::size_t d) { return d == 0 ? "fwd" : "bwd"; }

std::string tensor_name(std::size_t layer, std::size_t dir, const char* what) {
  return "l" + std::to_string(layer) + "." + dir_name(dir) + "." + what;
}

// Activations of one direction of one layer, indexed by time (not step).
struct DirectionTrace {
  bool reverse = false;
  std::vector<double> gates;  // T x 4H, post-activation i, f, g, o
  std::vector<double> c;      // T x H
  std::vector<double> tanh_c; // T x H
  std::vector<double> h;      // T x H
  std::vector<double> h_prev; // T x H
  std::vector<double> c_prev; // T x H
};

struct LayerTrace {
  std::size_t in_dim = 0;
  std::vector<double> input;   // T x in_dim
  std::vector<double> output;  // T x (H * dirs)
  DirectionTrace dirs[2];
};

struct ForwardTrace {
  std::size_t steps = 0;
  std::vector<LayerTrace> layers;
  std::vector<double> pooled;    // linear model: mean input
  std::vector<double> features;
  std::vector<double> logits;
};

void run_direction(const Tensor& w_x, const Tensor& w_h, const Tensor& b, const double* x,
                   std::size_t steps, std::size_t in_dim, std::size_t hidden, bool reverse,
                   DirectionTrace& tr) {
  const std::size_t g4 = 4 * hidden;
  tr.reverse = reverse;
  tr.gates.assign(steps * g4, 0.0);
  tr.c.assign(steps * hidden, 0.0);
  tr.tanh_c.assign(steps * hidden, 0.0);
  tr.h.assign(steps * hidden, 0.0);
  tr.h_prev.assign(steps * hidden, 0.0);
  tr.c_prev.assign(steps * hidden, 0.0);

  std::vector<double> z(steps * g4);
  for (std::size_t t = 0; t < steps; ++t) {
    std::copy(b.values.begin(), b.values.end(), z.begin() + static_cast<std::ptrdiff_t>(t * g4));
  }
  project(w_x.values.data(), g4, in_dim, x, steps, z.data());

  const auto& k = kernels::active();
  std::vector<double> h(hidden, 0.0), c(hidden, 0.0);
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    double* zt = z.data() + t * g4;
    k.gemv(w_h.values.data(), g4, hidden, h.data(), zt);
    std::copy(h.begin(), h.end(), tr.h_prev.begin() + static_cast<std::ptrdiff_t>(t * hidden));
    std::copy(c.begin(), c.end(), tr.c_prev.begin() + static_cast<std::ptrdiff_t>(t * hidden));
    double* gates = tr.gates.data() + t * g4;
    for (std::size_t j = 0; j < hidden; ++j) {
      const double ig = sigmoid(zt[j]);
      const double fg = sigmoid(zt[hidden + j]);
      const double gg = std::tanh(zt[2 * hidden + j]);
      const double og = sigmoid(zt[3 * hidden + j]);
      gates[j] = ig;
      gates[hidden + j] = fg;
      gates[2 * hidden + j] = gg;
      gates[3 * hidden + j] = og;
      c[j] = fg * c[j] + ig * gg;
      const double tc = std::tanh(c[j]);
      h[j] = og * tc;
      tr.c[t * hidden + j] = c[j];
      tr.tanh_c[t * hidden + j] = tc;
      tr.h[t * hidden + j] = h[j];
    }
  }
}

// dh_out(t) lives at dout[t * stride + offset]. Accumulates into the weight
// gradients and, when dx is non-null, into dX (T x in_dim).
void backward_direction(const Tensor& w_x, const Tensor& w_h, const DirectionTrace& tr,
                        const double* x, std::size_t steps, std::size_t in_dim,
                        std::size_t hidden, const double* dout, std::size_t stride,
                        std::size_t offset, Tensor& dw_x, Tensor& dw_h, Tensor& db, double* dx) {
  const std::size_t g4 = 4 * hidden;
  const auto& k = kernels::active();
  std::vector<double> dz(steps * g4, 0.0);
  std::vector<double> dh_rec(hidden, 0.0), dc_next(hidden, 0.0);
  for (std::size_t s = steps; s-- > 0;) {
    const std::size_t t = tr.reverse ? steps - 1 - s : s;
    const double* gates = tr.gates.data() + t * g4;
    const double* tanh_c = tr.tanh_c.data() + t * hidden;
    const double* c_prev = tr.c_prev.data() + t * hidden;
    const double* dh_out = dout + t * stride + offset;
    double* dzt = dz.data() + t * g4;
    for (std::size_t j = 0; j < hidden; ++j) {
      const double ig = gates[j], fg = gates[hidden + j], gg = gates[2 * hidden + j],
                   og = gates[3 * hidden + j];
      const double dh = dh_out[j] + dh_rec[j];
      const double d_o = dh * tanh_c[j];
      const double dc = dc_next[j] + dh * og * (1.0 - tanh_c[j] * tanh_c[j]);
      dzt[j] = dc * gg * ig * (1.0 - ig);
      dzt[hidden + j] = dc * c_prev[j] * fg * (1.0 - fg);
      dzt[2 * hidden + j] = dc * ig * (1.0 - gg * gg);
      dzt[3 * hidden + j] = d_o * og * (1.0 - og);
      dc_next[j] = dc * fg;
    }
    std::fill(dh_rec.begin(), dh_rec.end(), 0.0);
    k.gemv_t(w_h.values.data(), g4, hidden, dzt, dh_rec.data());
  }
  for (std::size_t t = 0; t < steps; ++t) {
    k.axpy(1.0, dz.data() + t * g4, db.values.data(), g4);
  }
  accumulate_outer(dz.data(), g4, tr.h_prev.data(), hidden, steps, dw_h.values.data());
  accumulate_outer(dz.data(), g4, x, in_dim, steps, dw_x.values.data());
  if (dx != nullptr) back_project(w_x.values.data(), g4, in_dim, dz.data(), steps, dx);
}

std::vector<double> to_double(const EmbeddingMatrix& x, std::size_t steps) {
  std::vector<double> out(steps * x.dim);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(x.data[i]);
  return out;
}

void check_input(const ModelParams& params, const EmbeddingMatrix& x) {
  if (x.dim != params.spec.input_dim) {
    throw ShapeError("embedding dim " + std::to_string(x.dim) + " does not match classifier input " +
                     std::to_string(params.spec.input_dim));
  }
  if (x.valid_rows > x.rows || x.data.size() != x.rows * x.dim) {
    throw ShapeError("embedding matrix storage is inconsistent");
  }
}

ForwardTrace run_forward(const ModelParams& params, const EmbeddingMatrix& x) {
  check_input(params, x);
  const ClassifierSpec& spec = params.spec;
  ForwardTrace tr;
  tr.steps = x.valid_rows;
  const std::size_t steps = tr.steps;
  const std::size_t hidden = spec.hidden_size;
  const auto& k = kernels::active();

  if (spec.kind == ClassifierKind::kLinear) {
    tr.pooled.assign(spec.input_dim, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
      for (std::size_t j = 0; j < spec.input_dim; ++j) tr.pooled[j] += x.row(t)[j];
    }
    if (steps > 0) {
      for (double& v : tr.pooled) v /= static_cast<double>(steps);
    }
    const Tensor& w1 = params.get("fc1.w");
    const Tensor& b1 = params.get("fc1.b");
    tr.features = b1.values;
    k.gemv(w1.values.data(), hidden, spec.input_dim, tr.pooled.data(), tr.features.data());
    for (double& v : tr.features) v = std::tanh(v);
    const Tensor& w2 = params.get("fc2.w");
    tr.logits = params.get("fc2.b").values;
    k.gemv(w2.values.data(), spec.num_classes, hidden, tr.features.data(), tr.logits.data());
    return tr;
  }

  const std::size_t dirs = spec.directions();
  tr.layers.resize(spec.num_layers);
  for (std::size_t l = 0; l < spec.num_layers; ++l) {
    LayerTrace& layer = tr.layers[l];
    if (l == 0) {
      layer.in_dim = spec.input_dim;
      layer.input = to_double(x, steps);
    } else {
      layer.in_dim = hidden * dirs;
      layer.input = tr.layers[l - 1].output;
    }
    layer.output.assign(steps * hidden * dirs, 0.0);
    for (std::size_t d = 0; d < dirs; ++d) {
      run_direction(params.get(tensor_name(l, d, "w_x")), params.get(tensor_name(l, d, "w_h")),
                    params.get(tensor_name(l, d, "b")), layer.input.data(), steps, layer.in_dim,
                    hidden, d == 1, layer.dirs[d]);
      for (std::size_t t = 0; t < steps; ++t) {
        std::copy_n(layer.dirs[d].h.begin() + static_cast<std::ptrdiff_t>(t * hidden), hidden,
                    layer.output.begin() + static_cast<std::ptrdiff_t>(t * hidden * dirs + d * hidden));
      }
    }
  }
  tr.features.assign(hidden * dirs, 0.0);
  if (steps > 0) {
    const LayerTrace& top = tr.layers.back();
    // Forward direction ends at the last valid step, backward at step 0.
    std::copy_n(top.dirs[0].h.begin() + static_cast<std::ptrdiff_t>((steps - 1) * hidden), hidden,
                tr.features.begin());
    if (dirs == 2) {
      std::copy_n(top.dirs[1].h.begin(), hidden, tr.features.begin() + static_cast<std::ptrdiff_t>(hidden));
    }
  }
  tr.logits = params.get("head.b").values;
  k.gemv(params.get("head.w").values.data(), spec.num_classes, hidden * dirs, tr.features.data(),
         tr.logits.data());
  return tr;
}

void run_backward(const ModelParams& params, const ForwardTrace& tr,
                  std::span<const double> dlogits, ModelParams& grad) {
  const ClassifierSpec& spec = params.spec;
  const std::size_t hidden = spec.hidden_size;
  const auto& k = kernels::active();

  if (spec.kind == ClassifierKind::kLinear) {
    const Tensor& w2 = params.get("fc2.w");
    k.ger(dlogits.data(), spec.num_classes, tr.features.data(), hidden, grad.get("fc2.w").values.data());
    k.axpy(1.0, dlogits.data(), grad.get("fc2.b").values.data(), spec.num_classes);
    std::vector<double> da(hidden, 0.0);
    k.gemv_t(w2.values.data(), spec.num_classes, hidden, dlogits.data(), da.data());
    for (std::size_t j = 0; j < hidden; ++j) da[j] *= 1.0 - tr.features[j] * tr.features[j];
    k.ger(da.data(), hidden, tr.pooled.data(), spec.input_dim, grad.get("fc1.w").values.data());
    k.axpy(1.0, da.data(), grad.get("fc1.b").values.data(), hidden);
    return;
  }

  const std::size_t dirs = spec.directions();
  const std::size_t feat = hidden * dirs;
  const std::size_t steps = tr.steps;
  k.ger(dlogits.data(), spec.num_classes, tr.features.data(), feat, grad.get("head.w").values.data());
  k.axpy(1.0, dlogits.data(), grad.get("head.b").values.data(), spec.num_classes);
  if (steps == 0) return;
  std::vector<double> dfeat(feat, 0.0);
  k.gemv_t(params.get("head.w").values.data(), spec.num_classes, feat, dlogits.data(), dfeat.data());

  // Gradient w.r.t. the top layer's concatenated output, T x feat.
  std::vector<double> dout(steps * feat, 0.0);
  std::copy_n(dfeat.begin(), hidden, dout.begin() + static_cast<std::ptrdiff_t>((steps - 1) * feat));
  if (dirs == 2) {
    std::copy_n(dfeat.begin() + static_cast<std::ptrdiff_t>(hidden), hidden,
                dout.begin() + static_cast<std::ptrdiff_t>(hidden));
  }

  for (std::size_t l = spec.num_layers; l-- > 0;) {
    const LayerTrace& layer = tr.layers[l];
    std::vector<double> dinput;
    if (l > 0) dinput.assign(steps * layer.in_dim, 0.0);
    for (std::size_t d = 0; d < dirs; ++d) {
      backward_direction(params.get(tensor_name(l, d, "w_x")), params.get(tensor_name(l, d, "w_h")),
                         layer.dirs[d], layer.input.data(), steps, layer.in_dim, hidden,
                         dout.data(), feat, d * hidden, grad.get(tensor_name(l, d, "w_x")),
                         grad.get(tensor_name(l, d, "w_h")), grad.get(tensor_name(l, d, "b")),
                         l > 0 ? dinput.data() : nullptr);
    }
    if (l > 0) dout = std::move(dinput);
  }
}

double example_loss(const std::vector<double>& probs, int label) {
  return -std::log(std::max(probs[static_cast<std::size_t>(label)], kProbabilityFloor));
}

void check_batch(const ModelParams& params, std::span<const Example> batch) {
  if (batch.empty()) throw ValidationError("loss needs a non-empty batch");
  for (const Example& ex : batch) {
    if (ex.x == nullptr) throw ValidationError("example without input");
    if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= params.spec.num_classes) {
      throw ValidationError("example label " + std::to_string(ex.label) + " out of range");
    }
  }
}

}  // namespace

std::string_view classifier_kind_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kBiLstm:
      return "bilstm";
    case ClassifierKind::kLstm:
      return "lstm";
    case ClassifierKind::kLinear:
      return "linear";
  }
  return "bilstm";
}

ClassifierKind parse_classifier_kind(std::string_view name) {
  if (name == "bilstm") return ClassifierKind::kBiLstm;
  if (name == "lstm") return ClassifierKind::kLstm;
  if (name == "linear") return ClassifierKind::kLinear;
  throw ValidationError("unknown classifier kind '" + std::string(name) + "'");
}

void ClassifierSpec::validate() const {
  if (input_dim < 1) throw ValidationError("classifier input_dim must be >= 1");
  if (hidden_size < 1) throw ValidationError("classifier hidden_size must be >= 1");
  if (num_layers < 1) throw ValidationError("classifier num_layers must be >= 1");
  if (num_classes < 2) throw ValidationError("classifier num_classes must be >= 2");
}

Tensor& ModelParams::get(std::string_view name) {
  for (Tensor& t : tensors) {
    if (t.name == name) return t;
  }
  throw ShapeError("model has no tensor '" + std::string(name) + "'");
}

const Tensor& ModelParams::get(std::string_view name) const {
  return const_cast<ModelParams*>(this)->get(name);
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor& t : tensors) n += t.values.size();
  return n;
}

bool ModelParams::all_finite() const {
  for (const Tensor& t : tensors) {
    for (double v : t.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

bool ModelParams::operator==(const ModelParams& other) const {
  if (!(spec == other.spec) || tensors.size() != other.tensors.size()) return false;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const Tensor& a = tensors[i];
    const Tensor& b = other.tensors[i];
    if (a.name != b.name || a.rows != b.rows || a.cols != b.cols) return false;
    if (a.values.size() != b.values.size()) return false;
    // Bitwise so that -0.0 and NaN payloads count as differences.
    if (std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

ModelParams zero_params(const ClassifierSpec& spec) {
  spec.validate();
  ModelParams p;
  p.spec = spec;
  auto add = [&](std::string name, std::size_t rows, std::size_t cols) {
    p.tensors.push_back({std::move(name), rows, cols, std::vector<double>(rows * cols, 0.0)});
  };
  const std::size_t h = spec.hidden_size;
  if (spec.kind == ClassifierKind::kLinear) {
    add("fc1.w", h, spec.input_dim);
    add("fc1.b", h, 1);
    add("fc2.w", spec.num_classes, h);
    add("fc2.b", spec.num_classes, 1);
    return p;
  }
  const std::size_t dirs = spec.directions();
  for (std::size_t l = 0; l < spec.num_layers; ++l) {
    const std::size_t in = l == 0 ? spec.input_dim : h * dirs;
    for (std::size_t d = 0; d < dirs; ++d) {
      add(tensor_name(l, d, "w_x"), 4 * h, in);
      add(tensor_name(l, d, "w_h"), 4 * h, h);
      add(tensor_name(l, d, "b"), 4 * h, 1);
    }
  }
  add("head.w", spec.num_classes, h * dirs);
  add("head.b", spec.num_classes, 1);
  return p;
}

ModelParams init_params(const ClassifierSpec& spec, std::uint64_t seed) {
  ModelParams p = zero_params(spec);
  Rng rng(derive_seed(seed, 0x1417));
  const double bound = 1.0 / std::sqrt(static_cast<double>(spec.hidden_size));
  for (Tensor& t : p.tensors) {
    const bool bias = t.cols == 1;
    if (bias) {
      // LSTM biases: zero except the forget gate.
      if (t.name.ends_with(".b") && t.name.front() == 'l') {
        for (std::size_t j = spec.hidden_size; j < 2 * spec.hidden_size; ++j) t.values[j] = 1.0;
      }
      continue;
    }
    for (double& v : t.values) v = rng.uniform(-bound, bound);
  }
  return p;
}

Prediction make_prediction(std::span<const double> z) {
  Prediction p;
  p.probabilities.resize(z.size());
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p.probabilities[i] = std::exp(z[i] - mx);
    sum += p.probabilities[i];
  }
  for (double& v : p.probabilities) v /= sum;
  p.predicted_class = static_cast<int>(
      std::max_element(p.probabilities.begin(), p.probabilities.end()) - p.probabilities.begin());
  return p;
}

std::vector<double> encode(const ModelParams& params, const EmbeddingMatrix& x) {
  return run_forward(params, x).features;
}

std::vector<double> logits(const ModelParams& params, const EmbeddingMatrix& x) {
  return run_forward(params, x).logits;
}

Prediction forward(const ModelParams& params, const EmbeddingMatrix& x) {
  return make_prediction(run_forward(params, x).logits);
}

double loss(const ModelParams& params, std::span<const Example> batch) {
  check_batch(params, batch);
  double total = 0.0;
  for (const Example& ex : batch) {
    total += example_loss(forward(params, *ex.x).probabilities, ex.label);
  }
  return total / static_cast<double>(batch.size());
}

LossAndGradient gradient(const ModelParams& params, std::span<const Example> batch) {
  check_batch(params, batch);
  LossAndGradient out;
  out.gradient = zero_params(params.spec);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const Example& ex : batch) {
    ForwardTrace tr = run_forward(params, *ex.x);
    const Prediction pred = make_prediction(tr.logits);
    total += example_loss(pred.probabilities, ex.label);
    std::vector<double> dlogits(pred.probabilities.size(), 0.0);
    // Below the floor the loss is constant in the parameters.
    if (pred.probabilities[static_cast<std::size_t>(ex.label)] >= kProbabilityFloor) {
      for (std::size_t c = 0; c < dlogits.size(); ++c) {
        dlogits[c] = scale * (pred.probabilities[c] - (static_cast<int>(c) == ex.label ? 1.0 : 0.0));
      }
    }
    run_backward(params, tr, dlogits, out.gradient);
  }
  out.loss = total * scale;
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning_rate must be a finite non-negative number");
  }
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(clip_norm > 0.0)) throw ValidationError("clip_norm must be positive");
}

TrainResult train(const ClassifierSpec& spec, std::span<const Example> train_set,
                  std::span<const Example> validation_set, const TrainConfig& config) {
  return train_from(init_params(spec, config.seed), train_set, validation_set, config);
}

TrainResult train_from(ModelParams params, std::span<const Example> train_set,
                       std::span<const Example> validation_set, const TrainConfig& config) {
  config.validate();
  if (train_set.empty() || validation_set.empty()) {
    throw ValidationError("training needs non-empty train and validation sets");
  }
  check_batch(params, train_set);
  check_batch(params, validation_set);

  const auto num_classes = static_cast<int>(params.spec.num_classes);
  std::vector<int> val_truth;
  for (const Example& ex : validation_set) val_truth.push_back(ex.label);

  TrainResult result;
  result.params = params;
  double best_f1 = -1.0;
  std::size_t since_best = 0;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Example> batch;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng rng(derive_seed(config.seed, 0xe90c + epoch));
    rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + config.batch_size); ++i) {
        batch.push_back(train_set[order[i]]);
      }
      LossAndGradient lg = gradient(params, batch);
      if (!std::isfinite(lg.loss)) {
        throw TrainingError("non-finite training loss in epoch " + std::to_string(epoch),
                            static_cast<int>(epoch));
      }
      loss_sum += lg.loss * static_cast<double>(batch.size());
      double norm2 = 0.0;
      for (const Tensor& g : lg.gradient.tensors) {
        for (double v : g.values) norm2 += v * v;
      }
      const double norm = std::sqrt(norm2);
      if (!std::isfinite(norm)) {
        throw TrainingError("non-finite gradient in epoch " + std::to_string(epoch),
                            static_cast<int>(epoch));
      }
      const double clip = norm > config.clip_norm ? config.clip_norm / norm : 1.0;
      const double step = -config.learning_rate * clip;
      if (step != 0.0) {
        for (std::size_t i = 0; i < params.tensors.size(); ++i) {
          kernels::active().axpy(step, lg.gradient.tensors[i].values.data(),
                                 params.tensors[i].values.data(), params.tensors[i].values.size());
        }
      }
    }

    std::vector<int> val_pred;
    for (const Example& ex : validation_set) val_pred.push_back(forward(params, *ex.x).predicted_class);
    const MetricsReport m = compute_metrics(val_truth, val_pred, num_classes);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(train_set.size());
    rec.validation_accuracy = m.accuracy;
    rec.validation_weighted_f1 = m.weighted_f1;
    result.history.push_back(rec);

    if (m.weighted_f1 > best_f1) {
      best_f1 = m.weighted_f1;
      result.params = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (config.early_stop_patience > 0 && ++since_best >= config.early_stop_patience) {
      break;
    }
  }
  return result;
}

void write_model(std::ostream& out, const ModelParams& params, std::string_view metadata_json) {
  json meta = metadata_json.empty() ? json::object() : json::parse(metadata_json);
  meta["kind"] = std::string(classifier_kind_name(params.spec.kind));
  meta["input_dim"] = params.spec.input_dim;
  meta["hidden_size"] = params.spec.hidden_size;
  meta["num_layers"] = params.spec.num_layers;
  meta["num_classes"] = params.spec.num_classes;
  meta["dtype"] = "float64";
  const std::string meta_text = meta.dump();

  auto put_u32 = [&](std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
  };
  auto put_u64 = [&](std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
  };
  out.write("VTEMODEL", 8);
  put_u32(1);
  put_u32(static_cast<std::uint32_t>(meta_text.size()));
  out.write(meta_text.data(), static_cast<std::streamsize>(meta_text.size()));
  put_u32(static_cast<std::uint32_t>(params.tensors.size()));
  for (const Tensor& t : params.tensors) {
    put_u32(static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put_u64(t.rows);
    put_u64(t.cols);
    for (double v : t.values) put_u64(std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw IoError("failed writing model");
}

ModelParams read_model(std::istream& in, std::string* metadata_json) {
  auto get_bytes = [&](char* dst, std::size_t n) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) throw ParseError("truncated model file");
  };
  auto get_u32 = [&] {
    unsigned char b[4];
    get_bytes(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  };
  auto get_u64 = [&] {
    unsigned char b[8];
    get_bytes(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  };
  char magic[8];
  get_bytes(magic, 8);
  if (std::memcmp(magic, "VTEMODEL", 8) != 0) throw ParseError("not a model file (bad magic)");
  const std::uint32_t version = get_u32();
  if (version != 1) throw ParseError("unsupported model file version " + std::to_string(version));
  std::string meta_text(get_u32(), '\0');
  get_bytes(meta_text.data(), meta_text.size());
  json meta;
  try {
    meta = json::parse(meta_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("model metadata: ") + e.what());
  }
  ClassifierSpec spec;
  try {
    spec.kind = parse_classifier_kind(meta.at("kind").get<std::string>());
    spec.input_dim = meta.at("input_dim").get<std::size_t>();
    spec.hidden_size = meta.at("hidden_size").get<std::size_t>();
    spec.num_layers = meta.at("num_layers").get<std::size_t>();
    spec.num_classes = meta.at("num_classes").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("model metadata: ") + e.what());
  }
  ModelParams params = zero_params(spec);
  const std::uint32_t count = get_u32();
  if (count != params.tensors.size()) throw ParseError("model tensor count does not match spec");
  for (Tensor& t : params.tensors) {
    std::string name(get_u32(), '\0');
    get_bytes(name.data(), name.size());
    const std::uint64_t rows = get_u64();
    const std::uint64_t cols = get_u64();
    if (name != t.name || rows != t.rows || cols != t.cols) {
      throw ParseError("model tensor '" + name + "' does not match the declared spec");
    }
    for (double& v : t.values) v = std::bit_cast<double>(get_u64());
  }
  if (metadata_json != nullptr) *metadata_json = meta_text;
  return params;
}

void save_model(const std::filesystem::path& path, const ModelParams& params,
                std::string_view metadata_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file " + path.string());
  write_model(out, params, metadata_json);
}

ModelParams load_model(const std::filesystem::path& path, std::string* metadata_json) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  return read_model(in, metadata_json);
}

std::vector<int> Evaluation::predicted_classes() const {
  std::vector<int> out;
  out.reserve(predictions.size());
  for (const Prediction& p : predictions) out.push_back(p.predicted_class);
  return out;
}

std::vector<std::vector<double>> Evaluation::probabilities() const {
  std::vector<std::vector<double>> out;
  out.reserve(predictions.size());
  for (const Prediction& p : predictions) out.push_back(p.probabilities);
  return out;
}

Evaluation evaluate(const ModelParams& params, std::span<const Example> examples) {
  Evaluation e;
  for (const Example& ex : examples) {
    e.truths.push_back(ex.label);
    e.predictions.push_back(forward(params, *ex.x));
  }
  const std::vector<int> preds = e.predicted_classes();
  e.metrics = compute_metrics(e.truths, preds, static_cast<int>(params.spec.num_classes));
  attach_roc(e.metrics, e.truths, e.probabilities());
  return e;
}

}  // namespace vte
