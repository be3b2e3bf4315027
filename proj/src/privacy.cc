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

#include "fairdp/privacy.h"

#include <cmath>
#include <limits>
#include <string>

#include "fairdp/errors.h"
#include "json_util.h"

namespace fairdp {

using internal::RealFromJson;
using internal::RealToJson;

std::string_view ToString(Adjacency adjacency) {
  switch (adjacency) {
    case Adjacency::kRemoveOne:
      return "remove_one";
    case Adjacency::kReplaceOne:
      return "replace_one";
  }
  return "unknown";
}

Adjacency AdjacencyFromString(std::string_view name) {
  if (name == "remove_one") return Adjacency::kRemoveOne;
  if (name == "replace_one") return Adjacency::kReplaceOne;
  throw UsageError("unknown adjacency '" + std::string(name) + "'");
}

void Validate(const PrivacyParams& params) {
  if (!(params.sigma >= 0.0) || !std::isfinite(params.sigma)) {
    throw UsageError("sigma must be a finite value >= 0");
  }
  if (!(params.delta_dp > 0.0 && params.delta_dp < 1.0)) {
    throw UsageError("delta_dp must be in (0,1)");
  }
}

ParamVector AddNoise(const ParamVector& avg_update, double s, double sigma,
                     RngStream& rng) {
  if (!(s > 0.0)) throw UsageError("noise scale S must be positive");
  if (sigma == 0.0) return avg_update;
  return avg_update + GaussianVector(rng, sigma * s, avg_update.dim());
}

double EpsilonPerRound(double sigma, double delta_dp, int m_t,
                       Adjacency adjacency) {
  if (!(delta_dp > 0.0 && delta_dp < 1.0)) {
    throw UsageError("delta_dp must be in (0,1)");
  }
  if (m_t < 1) throw UsageError("m_t must be >= 1");
  if (sigma < 0.0) throw UsageError("sigma must be >= 0");
  if (sigma == 0.0) return std::numeric_limits<double>::infinity();
  const double eps = std::sqrt(2.0 * std::log(1.25 / delta_dp)) /
                     (sigma * static_cast<double>(m_t));
  return adjacency == Adjacency::kReplaceOne ? 2.0 * eps : eps;
}

void PrivacyLedger::Compose(const LedgerEntry& entry) {
  if (!(entry.eps_round >= 0.0)) {
    throw UsageError("per-round epsilon must be >= 0");
  }
  rounds_.push_back(entry);
  std::vector<double> eps;
  eps.reserve(rounds_.size());
  for (const auto& r : rounds_) eps.push_back(r.eps_round);
  eps_total_basic_ = ExactSum(eps);
}

double PrivacyLedger::delta_total() const {
  return static_cast<double>(rounds_.size()) * delta_dp_;
}

std::string PrivacyLedger::ToJson() const {
  nlohmann::json j;
  j["delta_dp"] = delta_dp_;
  j["eps_total_basic"] = RealToJson(eps_total_basic_);
  j["delta_total"] = delta_total();
  j["rounds"] = nlohmann::json::array();
  for (const auto& r : rounds_) {
    j["rounds"].push_back({{"round_index", r.round_index},
                           {"S_used", r.s_used},
                           {"sigma", r.sigma},
                           {"eps_round", RealToJson(r.eps_round)}});
  }
  return j.dump();
}

PrivacyLedger PrivacyLedger::FromJson(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    PrivacyLedger ledger(j.at("delta_dp").get<double>());
    for (const auto& r : j.at("rounds")) {
      ledger.Compose({r.at("round_index").get<int>(),
                      r.at("S_used").get<double>(), r.at("sigma").get<double>(),
                      RealFromJson(r.at("eps_round"))});
    }
    return ledger;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed ledger json: ") + e.what());
  }
}

}  // namespace fairdp
