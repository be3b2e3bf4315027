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

#ifndef FAIRDP_DATAGEN_H_
#define FAIRDP_DATAGEN_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fairdp/models.h"
#include "fairdp/numeric.h"

namespace fairdp {

// Synthetic classification task. Each class c has a mean at distance
// class_separation / 2 from the origin (the two binary means sit exactly
// class_separation apart), features are mean + N(0, I). Group membership
// shifts features along a direction orthogonal to every class mean, with
// magnitude 2 * group_correlation, so the Bayes-optimal classifier stays
// linear while the group remains recoverable from the features.
struct DataSpec {
  int n_examples = 2000;
  int n_features = 20;
  int n_classes = 2;
  int n_groups = 2;
  double class_separation = 5.0;
  double group_correlation = 0.5;

  bool operator==(const DataSpec&) const = default;
};

void Validate(const DataSpec& spec);

struct Dataset {
  LabeledBatch train;
  LabeledBatch test;
};

// 80/20 train/test split; features standardized with train statistics.
Dataset Generate(const DataSpec& spec, RngStream rng);

enum class PartitionKind { kIid, kDirichletLabelSkew };

std::string_view ToString(PartitionKind kind);
PartitionKind PartitionKindFromString(std::string_view name);

struct PartitionScheme {
  PartitionKind kind = PartitionKind::kIid;
  double alpha = 1.0;  // dirichlet concentration

  bool operator==(const PartitionScheme&) const = default;
};

struct CleanTag {
  bool operator==(const CleanTag&) const = default;
};

// Flips the label of each example in `target_group` with probability p.
struct LabelFlip {
  double p = 0.0;
  int target_group = 0;
  bool operator==(const LabelFlip&) const = default;
};

// Multiplies the client's transmitted update by `factor`. Applied by the
// federation layer at transmission time; the shard data stays untouched.
struct UpdateScale {
  double factor = 1.0;
  std::int64_t direction_seed = 0;
  bool operator==(const UpdateScale&) const = default;
};

using BiasTag = std::variant<CleanTag, LabelFlip, UpdateScale>;
using BiasMode = std::variant<LabelFlip, UpdateScale>;

inline bool IsBiased(const BiasTag& tag) {
  return !std::holds_alternative<CleanTag>(tag);
}

struct ClientShard {
  int client_id = 0;
  LabeledBatch batch;
  BiasTag bias = CleanTag{};
  std::vector<std::size_t> rows;  // indices into the partitioned training set
};

// Disjoint cover of `train` by K shards, each holding at least one example.
// Rows inside a shard keep their original relative order, so K = 1 returns
// the training set unchanged.
std::vector<ClientShard> Partition(const LabeledBatch& train, int k,
                                   const PartitionScheme& scheme,
                                   RngStream rng);

// Tags a clean shard. LabelFlip is realized immediately on the labels
// (multiclass labels move to (y + 1) mod n_classes); UpdateScale only tags.
ClientShard InjectBias(ClientShard shard, const BiasMode& mode, int n_classes,
                       RngStream rng);

// CSV with header f0..f{n-1},label,group and 17 significant digits.
void WriteCsv(const std::string& path, const LabeledBatch& batch);
LabeledBatch ReadCsv(const std::string& path);

}  // namespace fairdp

#endif  // FAIRDP_DATAGEN_H_
