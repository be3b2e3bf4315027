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

#ifndef FAIRDP_MODELS_H_
#define FAIRDP_MODELS_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairdp/numeric.h"

namespace fairdp {

enum class ModelKind { kLogisticRegression, kMlp1Hidden };

std::string_view ToString(ModelKind kind);
ModelKind ModelKindFromString(std::string_view name);

// Model architecture. Binary problems use a single sigmoid head, multiclass
// problems use `n_classes` softmax heads. The MLP uses a tanh hidden layer.
//
// Flat parameter layout:
//   logistic regression: [W (heads x n_features, row-major), b (heads)]
//   mlp_1hidden:         [W1 (hidden x n_features), b1 (hidden),
//                         W2 (heads x hidden), b2 (heads)]
struct ModelSpec {
  ModelKind kind = ModelKind::kLogisticRegression;
  int n_features = 1;
  int n_classes = 2;
  int hidden_units = 8;

  int heads() const { return n_classes == 2 ? 1 : n_classes; }
  bool operator==(const ModelSpec&) const = default;
};

void Validate(const ModelSpec& spec);
std::size_t ParamDim(const ModelSpec& spec);

// One dense layer: weights is rows x cols, row-major.
struct DenseLayer {
  int rows = 0;
  int cols = 0;
  std::vector<double> weights;
  std::vector<double> bias;  // rows entries

  bool operator==(const DenseLayer&) const = default;
};

// Structured view of a flat parameter vector: one layer for logistic
// regression, hidden then output layer for the MLP.
struct ModelParams {
  std::vector<DenseLayer> layers;

  bool operator==(const ModelParams&) const = default;
};

ModelParams Unflatten(const ModelSpec& spec, const ParamVector& w);
ParamVector Flatten(const ModelSpec& spec, const ModelParams& params);

// Row-major example matrix with labels and sensitive-group attribute.
struct LabeledBatch {
  int n_features = 0;
  std::vector<double> features;  // size() * n_features values
  std::vector<int> labels;
  std::vector<int> groups;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  std::span<const double> Row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * n_features,
                                                     n_features);
  }
  // Copies the listed rows, in the listed order.
  LabeledBatch Subset(std::span<const std::size_t> rows) const;
  void Append(const LabeledBatch& other, std::size_t row);

  bool operator==(const LabeledBatch&) const = default;
};

// Throws UsageError if row counts disagree or a label/group is out of range.
void Validate(const LabeledBatch& batch, int n_classes);

struct EvalMetrics {
  double accuracy = 0.0;
  std::map<int, double> per_group_accuracy;  // groups with no examples omitted
  double loss = 0.0;

  bool operator==(const EvalMetrics&) const = default;
};

// Uniform in [-0.05, 0.05] for every coordinate.
ParamVector InitParams(const ModelSpec& spec, RngStream rng);

// Mean cross-entropy; probabilities clamped to [1e-12, 1 - 1e-12].
double Loss(const ModelSpec& spec, const ParamVector& w,
            const LabeledBatch& batch);

// Analytic gradient of Loss with respect to w.
ParamVector Gradient(const ModelSpec& spec, const ParamVector& w,
                     const LabeledBatch& batch);

// Predicted class per row; ties go to the lowest class index.
std::vector<int> Predict(const ModelSpec& spec, const ParamVector& w,
                         const LabeledBatch& batch);

// Mini-batch SGD. Each epoch e reshuffles the rows using
// rng.Derive("epoch", e), then walks them in chunks of `batch_size` (the last
// chunk may be short), applying w -= lr * Gradient(chunk).
ParamVector LocalTrain(const ModelSpec& spec, const ParamVector& w0,
                       const LabeledBatch& data, int epochs, double lr,
                       int batch_size, const RngStream& rng);

EvalMetrics Evaluate(const ModelSpec& spec, const ParamVector& w,
                     const LabeledBatch& data);

}  // namespace fairdp

#endif  // FAIRDP_MODELS_H_
