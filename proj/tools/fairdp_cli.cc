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

// Command-line front end.
//
//   fairdp run <config> [--seed N] [--out DIR] [--workers N] [--quiet]
//   fairdp run --preset fair_dp
//   fairdp compare <run_dir>... [--out comparison.csv]
//   fairdp sweep <config> --param M --values 0.5,1,2 [--out DIR]
//   fairdp preset <name>
//
// Exit codes: 0 success, 2 config error, 3 simulation abort, 4 I/O error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairdp/config.h"
#include "fairdp/errors.h"
#include "fairdp/harness.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAbort = 3;
constexpr int kExitIo = 4;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> workers;
  bool quiet = false;
};

std::string ResolveParam(const std::string& name) {
  static const std::map<std::string, std::string> aliases = {
      {"M", "federation.m"},
      {"S", "federation.s_fixed"},
      {"sigma", "privacy.sigma"},
      {"q", "federation.sample_fraction"},
      {"K", "federation.clients"},
      {"T", "federation.rounds"},
      {"lr", "federation.lr"},
      {"epochs", "federation.epochs"},
      {"seed", "experiment.seed"},
  };
  const auto it = aliases.find(name);
  return it == aliases.end() ? name : it->second;
}

std::vector<std::string> SplitValues(const std::string& text) {
  std::vector<std::string> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    if (end > start) values.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return values;
}

fairdp::ExperimentConfig LoadConfig(const std::string& path,
                                    const std::string& preset,
                                    const GlobalFlags& flags) {
  fairdp::ExperimentConfig config =
      preset.empty() ? fairdp::ParseConfig(path) : fairdp::Preset(preset);
  if (flags.seed) config.fed.seed = *flags.seed;
  if (flags.out) config.output_dir = *flags.out;
  if (flags.workers) config.fed.workers = *flags.workers;
  fairdp::Validate(config);
  if (!fairdp::UnbiasedMajority(config)) {
    std::cerr << "warning: biased clients are not a minority of K; the "
                 "median clipping bound is no longer protected\n";
  }
  return config;
}

void PrintSummary(const std::string& dir, const fairdp::RunSummary& s) {
  std::cout << "run " << dir << ": A_Fed=" << s.a_fed << " A_Cen=" << s.a_cen
            << " delta_acc=" << s.delta_acc
            << " per_group_gap=" << s.per_group_gap
            << " eps_total_nominal=" << s.eps_total_nominal << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private federated learning simulator with "
               "dual-threshold update clipping"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  std::uint64_t seed = 0;
  std::string out;
  int workers = 1;
  auto* seed_opt =
      app.add_option("--seed", seed, "Override the master seed")->group("Global");
  auto* out_opt = app.add_option("--out", out, "Output directory (run, sweep) "
                                 "or CSV path (compare)")
                      ->group("Global");
  auto* workers_opt =
      app.add_option("--workers", workers, "Intra-round client workers")
          ->check(CLI::PositiveNumber)
          ->group("Global");
  app.add_flag("--quiet", flags.quiet, "Suppress progress output")
      ->group("Global");

  auto* run = app.add_subcommand("run", "Run one experiment");
  std::string run_config, run_preset;
  run->add_option("config", run_config, "Config file");
  run->add_option("--preset", run_preset, "Run a shipped preset instead");

  auto* compare = app.add_subcommand("compare", "Compare finished runs");
  std::vector<std::string> compare_dirs;
  compare->add_option("dirs", compare_dirs, "Run directories")
      ->required()
      ->expected(2, -1);

  auto* sweep = app.add_subcommand("sweep", "Run a config over parameter values");
  std::string sweep_config, sweep_param, sweep_values;
  sweep->add_option("config", sweep_config, "Config file")->required();
  sweep->add_option("--param", sweep_param, "Key or alias (M, S, sigma, q, ...)")
      ->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values")
      ->required();

  auto* preset = app.add_subcommand("preset", "Print a preset as a config file");
  std::string preset_name;
  preset->add_option("name", preset_name, "Preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (*seed_opt) flags.seed = seed;
  if (*out_opt) flags.out = out;
  if (*workers_opt) flags.workers = workers;

  try {
    if (*run) {
      if (run_config.empty() == run_preset.empty()) {
        std::cerr << "run: give exactly one of <config> or --preset\n";
        return kExitConfig;
      }
      const auto config = LoadConfig(run_config, run_preset, flags);
      const auto summary = fairdp::RunExperiment(config);
      if (!flags.quiet) PrintSummary(config.output_dir, summary);
    } else if (*compare) {
      std::vector<std::pair<std::string, fairdp::RunSummary>> runs;
      for (const auto& dir : compare_dirs) {
        runs.emplace_back(dir, fairdp::LoadSummary(dir));
      }
      const auto rows = fairdp::CompareRuns(runs);
      std::cout << fairdp::FormatComparisonTable(rows);
      if (flags.out) {
        std::ofstream csv(*flags.out);
        if (!csv) throw fairdp::IoError(*flags.out, "cannot open for writing");
        csv << fairdp::ComparisonToCsv(rows);
      }
    } else if (*sweep) {
      const auto base = LoadConfig(sweep_config, "", flags);
      const std::string key = ResolveParam(sweep_param);
      const auto values = SplitValues(sweep_values);
      if (values.empty()) {
        std::cerr << "sweep: --values is empty\n";
        return kExitConfig;
      }
      std::vector<std::pair<std::string, fairdp::RunSummary>> runs;
      for (const auto& value : values) {
        auto config = base;
        fairdp::SetConfigValue(config, key, value);
        config.output_dir =
            (std::filesystem::path(base.output_dir) / (sweep_param + "=" + value))
                .string();
        const auto summary = fairdp::RunExperiment(config);
        if (!flags.quiet) PrintSummary(config.output_dir, summary);
        runs.emplace_back(config.output_dir, summary);
      }
      if (runs.size() >= 2) {
        const auto rows = fairdp::CompareRuns(runs);
        std::cout << fairdp::FormatComparisonTable(rows);
        const auto csv_path =
            std::filesystem::path(base.output_dir) / "comparison.csv";
        std::ofstream csv(csv_path);
        if (!csv) throw fairdp::IoError(csv_path.string(), "cannot open for writing");
        csv << fairdp::ComparisonToCsv(rows);
      }
    } else if (*preset) {
      std::cout << fairdp::SerializeConfig(fairdp::Preset(preset_name));
    }
  } catch (const fairdp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fairdp::UsageError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fairdp::SimulationAbort& e) {
    std::cerr << "simulation aborted: " << e.what() << "\n";
    return kExitAbort;
  } catch (const fairdp::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
