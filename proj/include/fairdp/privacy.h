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

#ifndef FAIRDP_PRIVACY_H_
#define FAIRDP_PRIVACY_H_

#include <string>
#include <string_view>
#include <vector>

#include "fairdp/numeric.h"

namespace fairdp {

// remove_one: neighbouring runs differ by one client being absent, giving
// L2 sensitivity S / m_t on the clipped average. replace_one doubles it.
enum class Adjacency { kRemoveOne, kReplaceOne };

std::string_view ToString(Adjacency adjacency);
Adjacency AdjacencyFromString(std::string_view name);

struct PrivacyParams {
  double sigma = 0.0;  // noise std = sigma * S
  double delta_dp = 1e-5;
  Adjacency adjacency = Adjacency::kRemoveOne;

  bool operator==(const PrivacyParams&) const = default;
};

void Validate(const PrivacyParams& params);

// Adds N(0, (sigma * S)^2) independently to each coordinate. sigma == 0 is
// an exact no-op.
ParamVector AddNoise(const ParamVector& avg_update, double s, double sigma,
                     RngStream& rng);

// Classical Gaussian-mechanism epsilon for one round:
//   sqrt(2 ln(1.25 / delta_dp)) / (sigma * m_t)
// multiplied by 2 under replace-one adjacency. sigma == 0 yields +infinity.
double EpsilonPerRound(double sigma, double delta_dp, int m_t,
                       Adjacency adjacency = Adjacency::kRemoveOne);

struct LedgerEntry {
  int round_index = 0;
  double s_used = 0.0;
  double sigma = 0.0;
  double eps_round = 0.0;

  bool operator==(const LedgerEntry&) const = default;
};

// Append-only basic-composition accountant. The reported epsilon is nominal:
// it assumes S was fixed in advance, which the median policy violates.
class PrivacyLedger {
 public:
  PrivacyLedger() = default;
  explicit PrivacyLedger(double delta_dp) : delta_dp_(delta_dp) {}

  void Compose(const LedgerEntry& entry);

  const std::vector<LedgerEntry>& rounds() const { return rounds_; }
  double eps_total_basic() const { return eps_total_basic_; }
  double delta_dp() const { return delta_dp_; }
  // delta composed over all rounds: T * delta_dp.
  double delta_total() const;

  std::string ToJson() const;
  static PrivacyLedger FromJson(std::string_view text);

  bool operator==(const PrivacyLedger&) const = default;

 private:
  std::vector<LedgerEntry> rounds_;
  double eps_total_basic_ = 0.0;
  double delta_dp_ = 1e-5;
};

}  // namespace fairdp

#endif  // FAIRDP_PRIVACY_H_
