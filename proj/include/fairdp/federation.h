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

#ifndef FAIRDP_FEDERATION_H_
#define FAIRDP_FEDERATION_H_

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "fairdp/clipping.h"
#include "fairdp/datagen.h"
#include "fairdp/models.h"
#include "fairdp/numeric.h"
#include "fairdp/privacy.h"

namespace fairdp {

enum class SPolicy { kMedianAdaptive, kFixed };

std::string_view ToString(SPolicy policy);
SPolicy SPolicyFromString(std::string_view name);

struct FedConfig {
  int clients = 10;              // K
  double sample_fraction = 1.0;  // q; m_t = ceil(q * K)
  int rounds = 50;               // T
  int epochs = 1;
  double lr = 0.1;
  int batch_size = 32;
  SPolicy s_policy = SPolicy::kMedianAdaptive;
  double s_fixed = 1.0;  // used when s_policy == kFixed
  double m = std::numeric_limits<double>::infinity();  // bias bound M
  PrivacyParams privacy;
  std::uint64_t seed = 0;
  int workers = 1;  // intra-round client parallelism; never affects results

  bool operator==(const FedConfig&) const = default;
};

// Throws ConfigError naming the offending federation/privacy key.
void Validate(const FedConfig& config);

// m_t = ceil(q * K), computed with a 1e-9 guard so that q = 0.3, K = 10
// gives 3 rather than 4.
int SampledCount(int clients, double sample_fraction);

struct ClientReport {
  int id = 0;
  double norm_pre = 0.0;
  double clip_factor = 1.0;
  ClippedBy clipped_by = ClippedBy::kNone;
  bool biased = false;

  bool operator==(const ClientReport&) const = default;
};

// Telemetry for one communication round. Carries every quantity of the
// aggregation rule: the sampled set (m_t), per-client pre-clip norms and
// clip factors, S, M, the noise std (sigma * S), and the round epsilon.
struct RoundRecord {
  int round = 0;
  std::vector<int> sampled_clients;
  std::vector<ClientReport> per_client;
  double s_used = 0.0;
  double m_used = 0.0;
  double noise_std = 0.0;
  double eps_round = 0.0;
  EvalMetrics eval;

  bool operator==(const RoundRecord&) const = default;
};

struct ServerState {
  int round = 0;
  ParamVector w_global;
  PrivacyLedger ledger;
  std::vector<RoundRecord> history;
};

// Uniform fixed-size sample without replacement, sorted ascending.
std::vector<int> SampleClients(int clients, double sample_fraction,
                               RngStream rng);

// Median of the round's pre-clip update norms, floored at 1e-12.
double AdaptiveS(std::span<const double> update_norms);

// Model-level bias at transmission time: update_scale multiplies the update
// by its factor; every other tag passes it through.
ParamVector ApplyUpdateBias(const ParamVector& delta, const BiasTag& tag);

struct Aggregate {
  ParamVector mean;                 // (1/m) * sum of clipped updates
  std::vector<ClipReport> reports;  // one per update, input order
};

// Dual-clips each update with (S, M) and averages them in input order.
Aggregate AggregateUpdates(std::span<const ParamVector> updates, double s,
                           double m);

// Random streams used by a run, all derived from RngStream::Root(seed):
//   "init"                           initial global model
//   "round"(t) / "sample"            client sampling in round t
//   "round"(t) / "client"(id)        local training of client id in round t
//                                    (LocalTrain derives "epoch"(e) from it)
//   "round"(t) / "noise"             server noise in round t
RngStream RoundStream(std::uint64_t seed, int round);
RngStream ClientStream(std::uint64_t seed, int round, int client_id);

// One round of the protocol. `shards[i].client_id` must equal i. Advances
// `state` (weights, ledger, history) and returns the round's record. Throws
// SimulationAbort if any update or the new global model is non-finite.
RoundRecord RunRound(ServerState& state, std::span<const ClientShard> shards,
                     const FedConfig& config, const ModelSpec& spec,
                     const LabeledBatch& test);

struct TrainingResult {
  ParamVector final_w;
  std::vector<RoundRecord> history;
  PrivacyLedger ledger;
};

ServerState InitialState(const FedConfig& config, const ModelSpec& spec);

// T rounds from the shared initial model, evaluating on `test` every round.
TrainingResult RunTraining(const FedConfig& config, const ModelSpec& spec,
                           std::span<const ClientShard> shards,
                           const LabeledBatch& test);

}  // namespace fairdp

#endif  // FAIRDP_FEDERATION_H_
