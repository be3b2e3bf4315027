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

#ifndef FAIRDP_HARNESS_H_
#define FAIRDP_HARNESS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairdp/config.h"
#include "fairdp/datagen.h"
#include "fairdp/federation.h"
#include "fairdp/models.h"
#include "fairdp/privacy.h"

namespace fairdp {

// Note attached to every summary: the epsilon assumes a fixed S.
inline constexpr std::string_view kNominalEpsilonNote =
    "nominal epsilon: basic composition of the Gaussian mechanism assuming a "
    "fixed clipping bound S; a data-dependent S (median policy) is not "
    "accounted for";

struct RunSummary {
  double a_fed = 0.0;
  double a_cen = 0.0;
  double delta_acc = 0.0;      // |a_fed - a_cen|
  double per_group_gap = 0.0;  // max - min group accuracy of the final model
  double eps_total_nominal = 0.0;
  std::int64_t wall_ms = 0;

  bool operator==(const RunSummary&) const = default;
};

// Data and client shards of a scenario, bias already injected. Streams:
// data from Root(seed).Derive("data"), partition from "partition", bias for
// client i from "bias"(i).
struct Scenario {
  Dataset data;
  std::vector<ClientShard> shards;
};

Scenario BuildScenario(const ExperimentConfig& config);

struct Baseline {
  ParamVector w;
  EvalMetrics metrics;
};

// Trains the model on the pooled clean training set for T * epochs passes,
// reusing the federated stream layout: same initial model, and pass t uses
// ClientStream(seed, t, 0). With K = 1 and no clipping or noise this
// reproduces the federated trajectory.
Baseline CentralizedBaseline(const ExperimentConfig& config,
                             const Dataset& data);
Baseline CentralizedBaseline(const ExperimentConfig& config);

struct ExperimentResult {
  RunSummary summary;
  TrainingResult training;
  Baseline baseline;
};

// Runs the scenario in memory; nothing touches the disk.
ExperimentResult Simulate(const ExperimentConfig& config);

// Simulates and writes config.echo, rounds.jsonl, summary.json and, when
// emit_csv is set, rounds.csv into config.output_dir.
RunSummary RunExperiment(const ExperimentConfig& config);

// Record encodings. One JSON object per line in rounds.jsonl; +inf reals are
// written as the string "inf".
std::string RoundRecordToJson(const RoundRecord& record);
RoundRecord RoundRecordFromJson(std::string_view line);
std::string SummaryToJson(const RunSummary& summary);
RunSummary SummaryFromJson(std::string_view text);

RunSummary LoadSummary(const std::string& run_dir);
std::vector<RoundRecord> LoadRounds(const std::string& run_dir);

// Comparison table. Columns, in order:
//   run, A_Fed, A_Cen, delta_acc, per_group_gap, eps_total_nominal,
//   A_Fed_minus_first
struct ComparisonRow {
  std::string run;
  RunSummary summary;
  double a_fed_minus_first = 0.0;

  bool operator==(const ComparisonRow&) const = default;
};

const std::vector<std::string>& ComparisonColumns();

std::vector<ComparisonRow> CompareRuns(
    const std::vector<std::pair<std::string, RunSummary>>& runs);
std::string FormatComparisonTable(const std::vector<ComparisonRow>& rows);
std::string ComparisonToCsv(const std::vector<ComparisonRow>& rows);
std::vector<ComparisonRow> ComparisonFromCsv(std::string_view csv);

}  // namespace fairdp

#endif  // FAIRDP_HARNESS_H_
