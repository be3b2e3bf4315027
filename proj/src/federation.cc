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

#include "fairdp/federation.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>
#include <thread>

#include "fairdp/errors.h"

namespace fairdp {
namespace {

constexpr double kMinS = 1e-12;

struct ClientOutcome {
  ParamVector update;
  bool biased = false;
};

ClientOutcome TrainClient(const ClientShard& shard, const ParamVector& w_t,
                          const FedConfig& config, const ModelSpec& spec,
                          int round) {
  const ParamVector w_local =
      LocalTrain(spec, w_t, shard.batch, config.epochs, config.lr,
                 config.batch_size, ClientStream(config.seed, round,
                                                 shard.client_id));
  ClientOutcome out;
  out.update = ApplyUpdateBias(ComputeUpdate(w_local, w_t), shard.bias);
  out.biased = IsBiased(shard.bias);
  if (!out.update.AllFinite()) {
    throw SimulationAbort("round " + std::to_string(round) + ", client " +
                          std::to_string(shard.client_id) +
                          ": non-finite model update");
  }
  return out;
}

// Trains the sampled clients, optionally on several threads. Results land in
// slots indexed by sample position, so worker count never changes them.
std::vector<ClientOutcome> TrainSampled(std::span<const ClientShard> shards,
                                        const std::vector<int>& sampled,
                                        const ParamVector& w_t,
                                        const FedConfig& config,
                                        const ModelSpec& spec, int round) {
  std::vector<ClientOutcome> outcomes(sampled.size());
  std::vector<std::exception_ptr> errors(sampled.size());
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < sampled.size(); i += stride) {
      try {
        outcomes[i] = TrainClient(shards[sampled[i]], w_t, config, spec, round);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(std::max(1, config.workers)), sampled.size());
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return outcomes;
}

}  // namespace

std::string_view ToString(SPolicy policy) {
  switch (policy) {
    case SPolicy::kMedianAdaptive:
      return "median_adaptive";
    case SPolicy::kFixed:
      return "fixed";
  }
  return "unknown";
}

SPolicy SPolicyFromString(std::string_view name) {
  if (name == "median_adaptive") return SPolicy::kMedianAdaptive;
  if (name == "fixed") return SPolicy::kFixed;
  throw UsageError("unknown S policy '" + std::string(name) + "'");
}

void Validate(const FedConfig& config) {
  if (config.clients < 1) {
    throw ConfigError("federation.clients", "K must be >= 1");
  }
  if (!(config.sample_fraction > 0.0 && config.sample_fraction <= 1.0)) {
    throw ConfigError("federation.sample_fraction", "q must be in (0,1]");
  }
  if (config.rounds < 1) {
    throw ConfigError("federation.rounds", "T must be >= 1");
  }
  if (config.epochs < 1) {
    throw ConfigError("federation.epochs", "epochs must be >= 1");
  }
  if (!(config.lr > 0.0) || !std::isfinite(config.lr)) {
    throw ConfigError("federation.lr", "lr must be a finite value > 0");
  }
  if (config.batch_size < 1) {
    throw ConfigError("federation.batch_size", "batch_size must be >= 1");
  }
  if (config.s_policy == SPolicy::kFixed &&
      (!(config.s_fixed > 0.0) || !std::isfinite(config.s_fixed))) {
    throw ConfigError("federation.s_fixed", "S must be a finite value > 0");
  }
  if (!(config.m > 0.0)) {
    throw ConfigError("federation.m", "M must be > 0 (or inf)");
  }
  if (config.workers < 1) {
    throw ConfigError("federation.workers", "workers must be >= 1");
  }
  if (!(config.privacy.sigma >= 0.0) || !std::isfinite(config.privacy.sigma)) {
    throw ConfigError("privacy.sigma", "sigma must be a finite value >= 0");
  }
  if (!(config.privacy.delta_dp > 0.0 && config.privacy.delta_dp < 1.0)) {
    throw ConfigError("privacy.delta_dp", "delta_dp must be in (0,1)");
  }
}

int SampledCount(int clients, double sample_fraction) {
  const int m = static_cast<int>(
      std::ceil(sample_fraction * static_cast<double>(clients) - 1e-9));
  return std::clamp(m, 1, clients);
}

std::vector<int> SampleClients(int clients, double sample_fraction,
                               RngStream rng) {
  if (clients < 1) throw UsageError("number of clients must be >= 1");
  const int m = SampledCount(clients, sample_fraction);
  std::vector<int> ids(clients);
  std::iota(ids.begin(), ids.end(), 0);
  // Partial Fisher-Yates: the first m slots become the sample.
  for (int i = 0; i < m; ++i) {
    const int j =
        i + static_cast<int>(rng.NextBelow(static_cast<std::uint64_t>(clients - i)));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(m);
  std::sort(ids.begin(), ids.end());
  return ids;
}

double AdaptiveS(std::span<const double> update_norms) {
  return std::max(Median(update_norms), kMinS);
}

ParamVector ApplyUpdateBias(const ParamVector& delta, const BiasTag& tag) {
  if (const auto* scale = std::get_if<UpdateScale>(&tag)) {
    return delta * scale->factor;
  }
  return delta;
}

Aggregate AggregateUpdates(std::span<const ParamVector> updates, double s,
                           double m) {
  if (updates.empty()) throw UsageError("no updates to aggregate");
  Aggregate out;
  out.mean = ParamVector::Zeros(updates.front().dim());
  out.reports.reserve(updates.size());
  for (const auto& update : updates) {
    auto clipped = DualClip(update, s, m);
    out.mean += clipped.value;
    out.reports.push_back(clipped.report);
  }
  out.mean *= 1.0 / static_cast<double>(updates.size());
  return out;
}

RngStream RoundStream(std::uint64_t seed, int round) {
  return RngStream::Root(seed).Derive("round", static_cast<std::uint64_t>(round));
}

RngStream ClientStream(std::uint64_t seed, int round, int client_id) {
  return RoundStream(seed, round)
      .Derive("client", static_cast<std::uint64_t>(client_id));
}

RoundRecord RunRound(ServerState& state, std::span<const ClientShard> shards,
                     const FedConfig& config, const ModelSpec& spec,
                     const LabeledBatch& test) {
  if (static_cast<int>(shards.size()) != config.clients) {
    throw UsageError("expected " + std::to_string(config.clients) +
                     " shards, got " + std::to_string(shards.size()));
  }
  for (std::size_t i = 0; i < shards.size(); ++i) {
    if (shards[i].client_id != static_cast<int>(i)) {
      throw UsageError("shard " + std::to_string(i) + " has client_id " +
                       std::to_string(shards[i].client_id));
    }
  }
  const int t = state.round;
  const RngStream round_rng = RoundStream(config.seed, t);

  RoundRecord record;
  record.round = t;
  record.sampled_clients = SampleClients(config.clients, config.sample_fraction,
                                         round_rng.Derive("sample"));
  const int m_t = static_cast<int>(record.sampled_clients.size());

  auto outcomes = TrainSampled(shards, record.sampled_clients, state.w_global,
                               config, spec, t);

  std::vector<ParamVector> updates;
  std::vector<double> norms;
  updates.reserve(outcomes.size());
  for (auto& outcome : outcomes) {
    norms.push_back(L2Norm(outcome.update));
    updates.push_back(std::move(outcome.update));
  }
  record.s_used = config.s_policy == SPolicy::kMedianAdaptive
                      ? AdaptiveS(norms)
                      : config.s_fixed;
  record.m_used = config.m;

  const Aggregate aggregate = AggregateUpdates(updates, record.s_used, config.m);
  for (int i = 0; i < m_t; ++i) {
    const ClipReport& report = aggregate.reports[i];
    record.per_client.push_back({record.sampled_clients[i], report.pre_norm,
                                 report.factor, report.clipped_by,
                                 outcomes[i].biased});
  }

  RngStream noise_rng = round_rng.Derive("noise");
  const ParamVector noisy =
      AddNoise(aggregate.mean, record.s_used, config.privacy.sigma, noise_rng);
  record.noise_std = config.privacy.sigma * record.s_used;

  ParamVector next = state.w_global + noisy;
  if (!next.AllFinite()) {
    throw SimulationAbort("round " + std::to_string(t) +
                          ": non-finite global model after aggregation");
  }
  state.w_global = std::move(next);

  record.eps_round = EpsilonPerRound(config.privacy.sigma,
                                     config.privacy.delta_dp, m_t,
                                     config.privacy.adjacency);
  state.ledger.Compose({t, record.s_used, config.privacy.sigma,
                        record.eps_round});
  record.eval = Evaluate(spec, state.w_global, test);

  state.history.push_back(record);
  ++state.round;
  return record;
}

ServerState InitialState(const FedConfig& config, const ModelSpec& spec) {
  ServerState state;
  state.w_global = InitParams(spec, RngStream::Root(config.seed).Derive("init"));
  state.ledger = PrivacyLedger(config.privacy.delta_dp);
  return state;
}

TrainingResult RunTraining(const FedConfig& config, const ModelSpec& spec,
                           std::span<const ClientShard> shards,
                           const LabeledBatch& test) {
  Validate(config);
  ServerState state = InitialState(config, spec);
  for (int t = 0; t < config.rounds; ++t) {
    RunRound(state, shards, config, spec, test);
  }
  return {std::move(state.w_global), std::move(state.history),
          std::move(state.ledger)};
}

}  // namespace fairdp
