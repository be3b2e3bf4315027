// Copyright 2026 The fairdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairdp/models.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fairdp/errors.h"

namespace fairdp {
namespace {

constexpr double kProbFloor = 1e-12;

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double ClampProb(double p) {
  return std::clamp(p, kProbFloor, 1.0 - kProbFloor);
}

// Offsets of each parameter block inside the flat vector.
struct Layout {
  int in = 0;
  int hidden = 0;  // 0 for logistic regression
  int heads = 0;
  std::size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0, dim = 0;

  explicit Layout(const ModelSpec& spec)
      : in(spec.n_features), heads(spec.heads()) {
    if (spec.kind == ModelKind::kMlp1Hidden) {
      hidden = spec.hidden_units;
      w1 = 0;
      b1 = w1 + static_cast<std::size_t>(hidden) * in;
      w2 = b1 + hidden;
      b2 = w2 + static_cast<std::size_t>(heads) * hidden;
    } else {
      w2 = 0;
      b2 = static_cast<std::size_t>(heads) * in;
    }
    dim = b2 + heads;
  }

  int output_in() const { return hidden > 0 ? hidden : in; }
};

void CheckInputs(const ModelSpec& spec, const ParamVector& w,
                 const LabeledBatch& batch) {
  if (w.dim() != ParamDim(spec)) {
    throw UsageError("parameter dimension " + std::to_string(w.dim()) +
                     " does not match model dimension " +
                     std::to_string(ParamDim(spec)));
  }
  if (batch.empty()) throw UsageError("empty batch");
  if (batch.n_features != spec.n_features) {
    throw UsageError("batch has " + std::to_string(batch.n_features) +
                     " features, model expects " +
                     std::to_string(spec.n_features));
  }
}

// Forward pass for one row. Fills `hidden` (tanh activations, MLP only) and
// `logits` (one per head).
void Forward(const Layout& layout, std::span<const double> w,
             std::span<const double> x, std::vector<double>& hidden,
             std::vector<double>& logits) {
  std::span<const double> last = x;
  if (layout.hidden > 0) {
    hidden.assign(layout.hidden, 0.0);
    for (int h = 0; h < layout.hidden; ++h) {
      double a = w[layout.b1 + h];
      const double* row = &w[layout.w1 + static_cast<std::size_t>(h) * layout.in];
      for (int j = 0; j < layout.in; ++j) a += row[j] * x[j];
      hidden[h] = std::tanh(a);
    }
    last = hidden;
  }
  const int fan_in = layout.output_in();
  logits.assign(layout.heads, 0.0);
  for (int c = 0; c < layout.heads; ++c) {
    double z = w[layout.b2 + c];
    const double* row = &w[layout.w2 + static_cast<std::size_t>(c) * fan_in];
    for (int j = 0; j < fan_in; ++j) z += row[j] * last[j];
    logits[c] = z;
  }
}

// Converts logits to probabilities in place and returns the example loss.
// For the binary head, probs[0] = P(class 1).
double HeadLoss(std::vector<double>& logits, int label) {
  if (logits.size() == 1) {
    const double z = logits[0];
    const double p1 = Sigmoid(z);
    logits[0] = p1;
    return label == 1 ? -std::log(ClampProb(p1))
                      : -std::log(ClampProb(Sigmoid(-z)));
  }
  const double zmax = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& z : logits) {
    z = std::exp(z - zmax);
    total += z;
  }
  for (double& z : logits) z /= total;
  return -std::log(ClampProb(logits[label]));
}

int ArgmaxClass(const std::vector<double>& logits) {
  if (logits.size() == 1) return logits[0] > 0.0 ? 1 : 0;
  return static_cast<int>(std::max_element(logits.begin(), logits.end()) -
                          logits.begin());
}

// Sum of per-example gradients over `rows`, added into `grad`; returns the
// summed loss.
double AccumulateGradient(const Layout& layout, std::span<const double> w,
                          const LabeledBatch& batch,
                          std::span<const std::size_t> rows,
                          std::span<double> grad) {
  std::vector<double> hidden, out, dhidden;
  double loss = 0.0;
  const int fan_in = layout.output_in();
  for (std::size_t r : rows) {
    const auto x = batch.Row(r);
    const int y = batch.labels[r];
    Forward(layout, w, x, hidden, out);
    loss += HeadLoss(out, y);
    // out now holds probabilities; the head error is p - onehot(y).
    if (layout.heads == 1) {
      out[0] -= (y == 1 ? 1.0 : 0.0);
    } else {
      out[y] -= 1.0;
    }
    std::span<const double> last =
        layout.hidden > 0 ? std::span<const double>(hidden) : x;
    for (int c = 0; c < layout.heads; ++c) {
      const double d = out[c];
      double* g = &grad[layout.w2 + static_cast<std::size_t>(c) * fan_in];
      for (int j = 0; j < fan_in; ++j) g[j] += d * last[j];
      grad[layout.b2 + c] += d;
    }
    if (layout.hidden == 0) continue;
    dhidden.assign(layout.hidden, 0.0);
    for (int c = 0; c < layout.heads; ++c) {
      const double* row = &w[layout.w2 + static_cast<std::size_t>(c) * fan_in];
      for (int h = 0; h < layout.hidden; ++h) dhidden[h] += out[c] * row[h];
    }
    for (int h = 0; h < layout.hidden; ++h) {
      const double da = dhidden[h] * (1.0 - hidden[h] * hidden[h]);
      double* g = &grad[layout.w1 + static_cast<std::size_t>(h) * layout.in];
      for (int j = 0; j < layout.in; ++j) g[j] += da * x[j];
      grad[layout.b1 + h] += da;
    }
  }
  return loss;
}

std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

}  // namespace

std::string_view ToString(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogisticRegression:
      return "logistic_regression";
    case ModelKind::kMlp1Hidden:
      return "mlp_1hidden";
  }
  return "unknown";
}

ModelKind ModelKindFromString(std::string_view name) {
  if (name == "logistic_regression") return ModelKind::kLogisticRegression;
  if (name == "mlp_1hidden") return ModelKind::kMlp1Hidden;
  throw UsageError("unknown model kind '" + std::string(name) + "'");
}

void Validate(const ModelSpec& spec) {
  if (spec.n_features < 1) throw UsageError("n_features must be >= 1");
  if (spec.n_classes < 2) throw UsageError("n_classes must be >= 2");
  if (spec.kind == ModelKind::kMlp1Hidden && spec.hidden_units < 1) {
    throw UsageError("hidden_units must be >= 1");
  }
}

std::size_t ParamDim(const ModelSpec& spec) {
  Validate(spec);
  return Layout(spec).dim;
}

ModelParams Unflatten(const ModelSpec& spec, const ParamVector& w) {
  const Layout layout(spec);
  if (w.dim() != layout.dim) {
    throw UsageError("cannot unflatten a vector of dimension " +
                     std::to_string(w.dim()));
  }
  auto take = [&](std::size_t weights_at, std::size_t bias_at, int rows,
                  int cols) {
    DenseLayer layer;
    layer.rows = rows;
    layer.cols = cols;
    const auto v = w.values();
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    layer.weights.assign(v.begin() + weights_at, v.begin() + weights_at + n);
    layer.bias.assign(v.begin() + bias_at, v.begin() + bias_at + rows);
    return layer;
  };
  ModelParams params;
  if (layout.hidden > 0) {
    params.layers.push_back(take(layout.w1, layout.b1, layout.hidden, layout.in));
  }
  params.layers.push_back(
      take(layout.w2, layout.b2, layout.heads, layout.output_in()));
  return params;
}

ParamVector Flatten(const ModelSpec& spec, const ModelParams& params) {
  const Layout layout(spec);
  const std::size_t expected_layers = layout.hidden > 0 ? 2 : 1;
  if (params.layers.size() != expected_layers) {
    throw UsageError("layer count does not match the model");
  }
  std::vector<double> flat;
  flat.reserve(layout.dim);
  for (const auto& layer : params.layers) {
    if (layer.weights.size() != static_cast<std::size_t>(layer.rows) * layer.cols ||
        layer.bias.size() != static_cast<std::size_t>(layer.rows)) {
      throw UsageError("layer shape is inconsistent");
    }
    flat.insert(flat.end(), layer.weights.begin(), layer.weights.end());
    flat.insert(flat.end(), layer.bias.begin(), layer.bias.end());
  }
  if (flat.size() != layout.dim) {
    throw UsageError("layer shapes do not match the model");
  }
  return ParamVector(std::move(flat));
}

LabeledBatch LabeledBatch::Subset(std::span<const std::size_t> rows) const {
  LabeledBatch out;
  out.n_features = n_features;
  out.features.reserve(rows.size() * n_features);
  out.labels.reserve(rows.size());
  out.groups.reserve(rows.size());
  for (std::size_t r : rows) out.Append(*this, r);
  return out;
}

void LabeledBatch::Append(const LabeledBatch& other, std::size_t row) {
  const auto x = other.Row(row);
  features.insert(features.end(), x.begin(), x.end());
  labels.push_back(other.labels[row]);
  groups.push_back(other.groups[row]);
}

void Validate(const LabeledBatch& batch, int n_classes) {
  if (batch.n_features < 1) throw UsageError("batch needs >= 1 feature");
  if (batch.groups.size() != batch.labels.size() ||
      batch.features.size() != batch.labels.size() * batch.n_features) {
    throw UsageError("batch row counts disagree");
  }
  for (int y : batch.labels) {
    if (y < 0 || y >= n_classes) {
      throw UsageError("label " + std::to_string(y) + " out of range");
    }
  }
  for (int g : batch.groups) {
    if (g < 0) throw UsageError("negative group index");
  }
}

ParamVector InitParams(const ModelSpec& spec, RngStream rng) {
  ParamVector w = ParamVector::Zeros(ParamDim(spec));
  for (double& x : w.mutable_values()) x = -0.05 + 0.1 * rng.NextUniform();
  return w;
}

double Loss(const ModelSpec& spec, const ParamVector& w,
            const LabeledBatch& batch) {
  CheckInputs(spec, w, batch);
  const Layout layout(spec);
  std::vector<double> hidden, out;
  double total = 0.0;
  for (std::size_t r = 0; r < batch.size(); ++r) {
    Forward(layout, w.values(), batch.Row(r), hidden, out);
    total += HeadLoss(out, batch.labels[r]);
  }
  return total / static_cast<double>(batch.size());
}

ParamVector Gradient(const ModelSpec& spec, const ParamVector& w,
                     const LabeledBatch& batch) {
  CheckInputs(spec, w, batch);
  const Layout layout(spec);
  ParamVector grad = ParamVector::Zeros(w.dim());
  const auto rows = AllRows(batch.size());
  AccumulateGradient(layout, w.values(), batch, rows, grad.mutable_values());
  grad *= 1.0 / static_cast<double>(batch.size());
  return grad;
}

std::vector<int> Predict(const ModelSpec& spec, const ParamVector& w,
                         const LabeledBatch& batch) {
  CheckInputs(spec, w, batch);
  const Layout layout(spec);
  std::vector<double> hidden, out;
  std::vector<int> predictions(batch.size());
  for (std::size_t r = 0; r < batch.size(); ++r) {
    Forward(layout, w.values(), batch.Row(r), hidden, out);
    predictions[r] = ArgmaxClass(out);
  }
  return predictions;
}

ParamVector LocalTrain(const ModelSpec& spec, const ParamVector& w0,
                       const LabeledBatch& data, int epochs, double lr,
                       int batch_size, const RngStream& rng) {
  if (data.empty()) throw UsageError("local training on an empty shard");
  if (epochs < 0) throw UsageError("epochs must be >= 0");
  if (!(lr > 0.0)) throw UsageError("learning rate must be positive");
  if (batch_size < 1) throw UsageError("batch_size must be >= 1");
  CheckInputs(spec, w0, data);

  const Layout layout(spec);
  ParamVector w = w0;
  ParamVector grad = ParamVector::Zeros(w.dim());
  std::vector<std::size_t> order = AllRows(data.size());
  const std::size_t step = static_cast<std::size_t>(batch_size);
  for (int e = 0; e < epochs; ++e) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream epoch_rng = rng.Derive("epoch", static_cast<std::uint64_t>(e));
    Shuffle(order, epoch_rng);
    for (std::size_t start = 0; start < order.size(); start += step) {
      const std::size_t count = std::min(step, order.size() - start);
      std::fill(grad.mutable_values().begin(), grad.mutable_values().end(),
                0.0);
      AccumulateGradient(layout, w.values(), data,
                         std::span<const std::size_t>(order).subspan(start, count),
                         grad.mutable_values());
      const double scale = lr / static_cast<double>(count);
      for (std::size_t k = 0; k < w.dim(); ++k) w[k] -= scale * grad[k];
    }
  }
  return w;
}

EvalMetrics Evaluate(const ModelSpec& spec, const ParamVector& w,
                     const LabeledBatch& data) {
  CheckInputs(spec, w, data);
  const Layout layout(spec);
  std::vector<double> hidden, out;
  std::map<int, std::pair<std::size_t, std::size_t>> group_counts;
  std::size_t correct = 0;
  double loss = 0.0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    Forward(layout, w.values(), data.Row(r), hidden, out);
    const int predicted = ArgmaxClass(out);
    loss += HeadLoss(out, data.labels[r]);
    const bool hit = predicted == data.labels[r];
    correct += hit;
    auto& [group_hits, group_total] = group_counts[data.groups[r]];
    group_hits += hit;
    ++group_total;
  }
  EvalMetrics metrics;
  const double n = static_cast<double>(data.size());
  metrics.accuracy = static_cast<double>(correct) / n;
  metrics.loss = loss / n;
  for (const auto& [group, counts] : group_counts) {
    metrics.per_group_accuracy[group] =
        static_cast<double>(counts.first) / static_cast<double>(counts.second);
  }
  return metrics;
}

}  // namespace fairdp
