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

#ifndef FAIRDP_CONFIG_H_
#define FAIRDP_CONFIG_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairdp/datagen.h"
#include "fairdp/federation.h"
#include "fairdp/models.h"

namespace fairdp {

enum class BiasKind { kNone, kLabelFlip, kUpdateScale };

std::string_view ToString(BiasKind kind);
BiasKind BiasKindFromString(std::string_view name);

// Which clients are biased, and how. Parameters of the inactive mode are
// kept so that the config round-trips.
struct BiasScenario {
  std::vector<int> clients;
  BiasKind kind = BiasKind::kNone;
  LabelFlip flip{1.0, 0};
  UpdateScale scale{25.0, 0};

  std::optional<BiasMode> mode() const;
  bool operator==(const BiasScenario&) const = default;
};

// Everything needed to reproduce one run. model.n_features and
// model.n_classes always mirror the data section.
struct ExperimentConfig {
  FedConfig fed;
  ModelSpec model;
  DataSpec data;
  PartitionScheme partition;
  BiasScenario bias;
  std::string output_dir = "runs/default";
  bool emit_csv = false;

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError with the dotted key path of the first violation.
void Validate(const ExperimentConfig& config);

// True when biased clients are a strict minority of K.
bool UnbiasedMajority(const ExperimentConfig& config);

// Shipped scenarios: fedavg_clean, dp_only, fair_dp, biased_attack.
const std::vector<std::string>& PresetNames();
ExperimentConfig Preset(std::string_view name);

// INI-style text. Sections and keys:
//
//   [experiment] preset, seed, output_dir, emit_csv
//   [data]       n_examples, n_features, n_classes, n_groups,
//                class_separation, group_correlation
//   [partition]  kind (iid | dirichlet_label_skew), alpha
//   [model]      kind (logistic_regression | mlp_1hidden), hidden_units
//   [federation] clients, sample_fraction, rounds, epochs, lr, batch_size,
//                s_policy (median_adaptive | fixed), s_fixed, m, workers
//   [privacy]    sigma, delta_dp, adjacency (remove_one | replace_one)
//   [bias]       clients (comma list), mode (none | label_flip |
//                update_scale), flip_prob, target_group, factor,
//                direction_seed
//
// `experiment.preset` selects the base scenario that the remaining keys
// override. Without a preset, federation.clients and federation.rounds are
// required. Reals accept "inf" where infinity is meaningful (federation.m).
// Unknown sections or keys are rejected.
ExperimentConfig ParseConfigText(std::string_view text);
ExperimentConfig ParseConfig(const std::string& path);

// Full dump of every key (no preset line), parseable by ParseConfigText.
std::string SerializeConfig(const ExperimentConfig& config);

// Overrides a single dotted key (e.g. "federation.m") with a textual value,
// using the same parsing rules as the config file. Used by sweeps.
void SetConfigValue(ExperimentConfig& config, std::string_view key,
                    std::string_view value);

}  // namespace fairdp

#endif  // FAIRDP_CONFIG_H_
