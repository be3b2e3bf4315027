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


// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fairdp/clipping.h"
#include "fairdp/config.h"
#include "fairdp/datagen.h"
#include "fairdp/federation.h"
#include "fairdp/harness.h"
#include "fairdp/models.h"
#include "fairdp/numeric.h"
#include "fairdp/privacy.h"

namespace fairdp {
namespace {

namespace fs = std::filesystem;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

double LogUniform(RngStream& rng, double lo, double hi) {
  return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.NextUniform());
}

// AC-1: dual clip equals a single norm clip at min(S, M).
Outcome DualClipIdentity() {
  RngStream rng = RngStream::Root(101);
  double worst_coord = 0.0, worst_excess = -kInf;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t dim = 1 + rng.NextBelow(32);
    const ParamVector delta = GaussianVector(rng, LogUniform(rng, 1e-3, 1e3), dim);
    const double s = LogUniform(rng, 1e-3, 1e3);
    const double m = rng.NextBelow(10) == 0 ? kInf : LogUniform(rng, 1e-3, 1e3);
    const ParamVector dual = DualClip(delta, s, m).value;
    const ParamVector single = ClipByNorm(delta, std::min(s, m)).value;
    for (std::size_t i = 0; i < dim; ++i) {
      worst_coord = std::max(worst_coord, std::abs(dual[i] - single[i]));
    }
    worst_excess = std::max(worst_excess, L2Norm(dual) - std::min(s, m));
  }
  return {worst_coord <= 1e-12 && worst_excess <= 1e-9,
          Fmt("max coord diff %.3g, max norm excess over min(S,M) %.3g",
              worst_coord, worst_excess)};
}

// AC-2: analytic gradients against central finite differences.
Outcome GradientCorrectness() {
  RngStream rng = RngStream::Root(202);
  double worst = 0.0;
  for (ModelKind kind : {ModelKind::kLogisticRegression, ModelKind::kMlp1Hidden}) {
    for (int trial = 0; trial < 100; ++trial) {
      ModelSpec spec;
      spec.kind = kind;
      spec.n_features = 1 + static_cast<int>(rng.NextBelow(6));
      spec.n_classes = 2 + static_cast<int>(rng.NextBelow(3));
      spec.hidden_units = 1 + static_cast<int>(rng.NextBelow(6));
      LabeledBatch batch;
      batch.n_features = spec.n_features;
      const int n = 1 + static_cast<int>(rng.NextBelow(16));
      for (int i = 0; i < n * spec.n_features; ++i) {
        batch.features.push_back(2.0 * rng.NextNormal());
      }
      for (int i = 0; i < n; ++i) {
        batch.labels.push_back(static_cast<int>(rng.NextBelow(spec.n_classes)));
        batch.groups.push_back(0);
      }
      const ParamVector w = GaussianVector(rng, 0.7, ParamDim(spec));
      const ParamVector analytic = Gradient(spec, w, batch);
      ParamVector numeric = ParamVector::Zeros(w.dim());
      const double h = 1e-6;
      for (std::size_t i = 0; i < w.dim(); ++i) {
        ParamVector plus = w, minus = w;
        plus[i] += h;
        minus[i] -= h;
        numeric[i] = (Loss(spec, plus, batch) - Loss(spec, minus, batch)) / (2 * h);
      }
      const double scale = std::max({L2Norm(analytic), L2Norm(numeric), 1e-12});
      worst = std::max(worst, L2Norm(analytic - numeric) / scale);
    }
  }
  return {worst < 1e-5, Fmt("max relative error %.3g over 200 points", worst)};
}

// AC-3: with clipping and noise disabled the protocol is plain FedAvg.
Outcome FedAvgReduction() {
  ExperimentConfig config = Preset("fedavg_clean");
  config.fed.rounds = 20;
  config.fed.seed = 303;
  const Scenario scenario = BuildScenario(config);
  const FedConfig& fed = config.fed;
  ServerState state = InitialState(fed, config.model);
  ParamVector reference = state.w_global;
  double worst = 0.0;
  for (int t = 0; t < fed.rounds; ++t) {
    RunRound(state, scenario.shards, fed, config.model, scenario.data.test);
    std::vector<double> sum(reference.dim(), 0.0);
    for (int i = 0; i < fed.clients; ++i) {
      const ParamVector local =
          LocalTrain(config.model, reference, scenario.shards[i].batch, fed.epochs,
                     fed.lr, fed.batch_size, ClientStream(fed.seed, t, i));
      for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += local[j] - reference[j];
    }
    for (std::size_t j = 0; j < sum.size(); ++j) {
      reference[j] += sum[j] / fed.clients;
      worst = std::max(worst, std::abs(state.w_global[j] - reference[j]));
    }
  }
  return {worst <= 1e-12, Fmt("max coord diff %.3g over 20 rounds", worst)};
}

// AC-4: server noise has the calibrated scale.
Outcome NoiseCalibration() {
  const std::size_t n = 1000000;
  RngStream rng = RngStream::Root(404).Derive("noise");
  const ParamVector noisy = AddNoise(ParamVector::Zeros(n), 2.0, 1.0, rng);
  double mean = 0.0;
  for (double x : noisy.values()) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : noisy.values()) var += (x - mean) * (x - mean);
  const double std = std::sqrt(var / (n - 1));
  const double mean_bound = 4.0 * std / std::sqrt(static_cast<double>(n));
  const ParamVector v{0.5, -1.25, 3.0};
  RngStream other = RngStream::Root(405);
  const bool exact = AddNoise(v, 2.0, 0.0, other) == v;
  return {std >= 1.98 && std <= 2.02 && std::abs(mean) <= mean_bound && exact,
          Fmt("std %.5f, |mean| %.3g (bound %.3g), sigma=0 exact %.0f", std,
              std::abs(mean), mean_bound, exact ? 1.0 : 0.0)};
}

// AC-5: clean federated training stays close to centralized training.
Outcome AccuracyLoss() {
  const ExperimentConfig config = Preset("fedavg_clean");
  const RunSummary s = Simulate(config).summary;
  return {s.delta_acc < 0.05,
          Fmt("A_Fed %.4f, A_Cen %.4f, |diff| %.4f", s.a_fed, s.a_cen, s.delta_acc)};
}

// Scenario shared by AC-6 and AC-9: two of ten clients send 25x updates.
ExperimentConfig AttackScenario(std::uint64_t seed, double m) {
  ExperimentConfig config = Preset("biased_attack");
  config.fed.seed = seed;
  config.fed.m = m;
  return config;
}

struct ClipShares {
  int biased = 0, biased_clipped = 0, clean = 0, clean_clipped = 0;
};

ClipShares CountClips(const std::vector<RoundRecord>& history) {
  ClipShares shares;
  for (const auto& r : history) {
    for (const auto& c : r.per_client) {
      const bool clipped = c.clipped_by != ClippedBy::kNone;
      if (c.biased) {
        ++shares.biased;
        shares.biased_clipped += clipped;
      } else {
        ++shares.clean;
        shares.clean_clipped += clipped;
      }
    }
  }
  return shares;
}

double CleanNormMedian(const std::vector<RoundRecord>& history) {
  std::vector<double> norms;
  for (const auto& r : history) {
    for (const auto& c : r.per_client) {
      if (!c.biased) norms.push_back(c.norm_pre);
    }
  }
  return Median(norms);
}

constexpr int kAttackSeeds = 5;
const double kMultipliers[] = {0.5, 1.0, 2.0};

// AC-6: a finite bias bound recovers accuracy lost to scaled updates.
Outcome BiasMitigation() {
  double acc_inf = 0.0;
  double acc_finite[3] = {0.0, 0.0, 0.0};
  ClipShares shares;
  for (std::uint64_t seed = 0; seed < kAttackSeeds; ++seed) {
    const ExperimentResult open = Simulate(AttackScenario(seed, kInf));
    acc_inf += open.summary.a_fed / kAttackSeeds;
    const double reference = CleanNormMedian(open.training.history);
    for (int k = 0; k < 3; ++k) {
      const ExperimentResult bounded =
          Simulate(AttackScenario(seed, kMultipliers[k] * reference));
      acc_finite[k] += bounded.summary.a_fed / kAttackSeeds;
      if (kMultipliers[k] == 2.0) {
        const ClipShares s = CountClips(bounded.training.history);
        shares.biased += s.biased;
        shares.biased_clipped += s.biased_clipped;
        shares.clean += s.clean;
        shares.clean_clipped += s.clean_clipped;
      }
    }
  }
  const int best = static_cast<int>(
      std::max_element(acc_finite, acc_finite + 3) - acc_finite);
  const double biased_share =
      static_cast<double>(shares.biased_clipped) / shares.biased;
  const double clean_share = static_cast<double>(shares.clean_clipped) / shares.clean;
  const bool improves = acc_finite[best] > acc_inf;
  std::ostringstream detail;
  detail << Fmt("mean acc M=inf %.4f; M=0.5x %.4f, 1x %.4f, 2x %.4f", acc_inf,
                acc_finite[0], acc_finite[1], acc_finite[2])
         << Fmt("; margin %+.4f; at M=2x clipped: biased %.1f%%, clean %.1f%%",
                acc_finite[best] - acc_inf, 100 * biased_share, 100 * clean_share);
  return {improves && biased_share >= 0.9 && clean_share <= 0.3, detail.str()};
}

// AC-7: accountant closed form and composition.
Outcome AccountantClosedForm() {
  const double eps = EpsilonPerRound(2.0, 1e-5, 1);
  const double oracle = std::sqrt(2.0 * std::log(1.25 / 1e-5)) / 2.0;
  const bool closed = std::abs(eps - 2.4223) <= 5e-4 && std::abs(eps - oracle) <= 1e-15;
  bool halves = true;
  for (int m : {1, 2, 5, 10, 50}) {
    const double a = EpsilonPerRound(1.0, 1e-5, m);
    const double b = EpsilonPerRound(1.0, 1e-5, 2 * m);
    halves = halves && std::abs(b - a / 2.0) <= 1e-15 * a;
  }
  bool composes = true;
  for (int t : {1, 10, 50, 500}) {
    PrivacyLedger ledger(1e-5);
    for (int i = 0; i < t; ++i) ledger.Compose({i, 1.0, 2.0, eps});
    composes = composes && ledger.eps_total_basic() == t * eps;
  }
  return {closed && halves && composes,
          Fmt("eps %.6f (oracle %.6f), halving %.0f, T*eps exact %.0f", eps, oracle,
              halves ? 1.0 : 0.0, composes ? 1.0 : 0.0)};
}

std::string ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// AC-8: rounds.jsonl is byte-identical across reruns and worker counts.
Outcome Determinism() {
  const fs::path root = fs::temp_directory_path() / "fairdp_acceptance_ac8";
  fs::remove_all(root);
  std::vector<std::string> mismatched;
  for (const std::string& name : PresetNames()) {
    std::string first;
    int run = 0;
    for (int workers : {1, 4, 1, 4}) {
      ExperimentConfig config = Preset(name);
      config.fed.workers = workers;
      config.output_dir = (root / (name + "_" + std::to_string(run++))).string();
      RunExperiment(config);
      const std::string bytes = ReadBytes(fs::path(config.output_dir) / "rounds.jsonl");
      if (first.empty()) {
        first = bytes;
      } else if (bytes != first) {
        mismatched.push_back(name);
        break;
      }
    }
  }
  fs::remove_all(root);
  std::string detail = std::to_string(PresetNames().size()) +
                       " presets x 4 runs (workers 1,4,1,4)";
  for (const auto& name : mismatched) detail += "; differs: " + name;
  return {mismatched.empty(), detail};
}

// AC-9: the median stays close to the clean-only median every round.
Outcome AdaptiveSRobustness() {
  double lo = kInf, hi = 0.0;
  int rounds = 0;
  for (std::uint64_t seed = 0; seed < kAttackSeeds; ++seed) {
    const ExperimentResult open = Simulate(AttackScenario(seed, kInf));
    const double reference = CleanNormMedian(open.training.history);
    for (double multiplier : {0.0, 0.5, 1.0, 2.0}) {
      const auto history =
          multiplier == 0.0
              ? open.training.history
              : Simulate(AttackScenario(seed, multiplier * reference)).training.history;
      for (const auto& r : history) {
        std::vector<double> clean;
        for (const auto& c : r.per_client) {
          if (!c.biased) clean.push_back(c.norm_pre);
        }
        const double ratio = r.s_used / Median(clean);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        ++rounds;
      }
    }
  }
  return {lo >= 0.5 && hi <= 2.0,
          Fmt("S_used / clean median in [%.3f, %.3f] over %.0f rounds", lo, hi,
              rounds)};
}

struct Criterion {
  const char* id;
  const char* name;
  double limit_s;  // 0 means no runtime limit
  std::function<Outcome()> check;
};

}  // namespace
}  // namespace fairdp

int main() {
  using fairdp::Criterion;
  const Criterion criteria[] = {
      {"AC-1", "dual-clip identity", 5, fairdp::DualClipIdentity},
      {"AC-2", "gradient correctness", 30, fairdp::GradientCorrectness},
      {"AC-3", "FedAvg reduction", 10, fairdp::FedAvgReduction},
      {"AC-4", "noise calibration", 10, fairdp::NoiseCalibration},
      {"AC-5", "accuracy loss", 60, fairdp::AccuracyLoss},
      {"AC-6", "bias mitigation", 300, fairdp::BiasMitigation},
      {"AC-7", "accountant closed form", 0, fairdp::AccountantClosedForm},
      {"AC-8", "determinism", 120, fairdp::Determinism},
      {"AC-9", "adaptive S robustness", 0, fairdp::AdaptiveSRobustness},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    fairdp::Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_s == 0 || seconds < c.limit_s;
    const bool pass = outcome.pass && in_time;
    failures += !pass;
    std::printf("%s %s %s: %s [%.2fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                outcome.detail.c_str(), seconds,
                in_time ? "" : ", over time limit");
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
