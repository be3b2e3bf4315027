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

#include "fairdp/harness.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "fairdp/errors.h"
#include "json_util.h"

namespace fairdp {
namespace {

namespace fs = std::filesystem;
using internal::RealFromJson;
using internal::RealToJson;
using json = nlohmann::ordered_json;

std::string FormatReal(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

double ParseCsvReal(std::string_view cell) {
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw UsageError("bad number in csv: '" + std::string(cell) + "'");
  }
  return value;
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(',', start);
    if (end == std::string_view::npos) end = line.size();
    cells.emplace_back(line.substr(start, end - start));
    start = end + 1;
  }
  return cells;
}

void WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

double GroupGap(const EvalMetrics& metrics) {
  if (metrics.per_group_accuracy.size() < 2) return 0.0;
  double lo = 1.0, hi = 0.0;
  for (const auto& [group, acc] : metrics.per_group_accuracy) {
    lo = std::min(lo, acc);
    hi = std::max(hi, acc);
  }
  return hi - lo;
}

std::string RoundsCsv(const std::vector<RoundRecord>& history, int n_groups) {
  std::ostringstream out;
  out << "round,m_t,S_used,M_used,noise_std,eps_round,accuracy,loss,"
         "n_dp_bound,n_bias_bound";
  for (int g = 0; g < n_groups; ++g) out << ",group_" << g << "_accuracy";
  out << '\n';
  for (const auto& r : history) {
    int n_dp = 0, n_bias = 0;
    for (const auto& c : r.per_client) {
      n_dp += c.clipped_by == ClippedBy::kDpBound;
      n_bias += c.clipped_by == ClippedBy::kBiasBound;
    }
    out << r.round << ',' << r.sampled_clients.size() << ','
        << FormatReal(r.s_used) << ',' << FormatReal(r.m_used) << ','
        << FormatReal(r.noise_std) << ',' << FormatReal(r.eps_round) << ','
        << FormatReal(r.eval.accuracy) << ',' << FormatReal(r.eval.loss) << ','
        << n_dp << ',' << n_bias;
    for (int g = 0; g < n_groups; ++g) {
      const auto it = r.eval.per_group_accuracy.find(g);
      out << ',';
      if (it != r.eval.per_group_accuracy.end()) out << FormatReal(it->second);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

Scenario BuildScenario(const ExperimentConfig& config) {
  Validate(config);
  const RngStream root = RngStream::Root(config.fed.seed);
  Scenario scenario;
  scenario.data = Generate(config.data, root.Derive("data"));
  scenario.shards = Partition(scenario.data.train, config.fed.clients,
                              config.partition, root.Derive("partition"));
  if (const auto mode = config.bias.mode()) {
    for (int id : config.bias.clients) {
      scenario.shards[id] =
          InjectBias(std::move(scenario.shards[id]), *mode,
                     config.data.n_classes,
                     root.Derive("bias", static_cast<std::uint64_t>(id)));
    }
  }
  return scenario;
}

Baseline CentralizedBaseline(const ExperimentConfig& config,
                             const Dataset& data) {
  const FedConfig& fed = config.fed;
  ParamVector w =
      InitParams(config.model, RngStream::Root(fed.seed).Derive("init"));
  for (int t = 0; t < fed.rounds; ++t) {
    w = LocalTrain(config.model, w, data.train, fed.epochs, fed.lr,
                   fed.batch_size, ClientStream(fed.seed, t, 0));
  }
  Baseline baseline{w, Evaluate(config.model, w, data.test)};
  return baseline;
}

Baseline CentralizedBaseline(const ExperimentConfig& config) {
  return CentralizedBaseline(config, BuildScenario(config).data);
}

ExperimentResult Simulate(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario scenario = BuildScenario(config);
  ExperimentResult result;
  result.training = RunTraining(config.fed, config.model, scenario.shards,
                                scenario.data.test);
  result.baseline = CentralizedBaseline(config, scenario.data);

  RunSummary& s = result.summary;
  const EvalMetrics& final_eval = result.training.history.back().eval;
  s.a_fed = final_eval.accuracy;
  s.a_cen = result.baseline.metrics.accuracy;
  s.delta_acc = std::abs(s.a_fed - s.a_cen);
  s.per_group_gap = GroupGap(final_eval);
  s.eps_total_nominal = result.training.ledger.eps_total_basic();
  s.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  return result;
}

RunSummary RunExperiment(const ExperimentConfig& config) {
  const ExperimentResult result = Simulate(config);
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());

  WriteFile(dir / "config.echo", SerializeConfig(config));
  std::string rounds;
  for (const auto& record : result.training.history) {
    rounds += RoundRecordToJson(record);
    rounds += '\n';
  }
  WriteFile(dir / "rounds.jsonl", rounds);
  WriteFile(dir / "summary.json", SummaryToJson(result.summary) + "\n");
  const fs::path csv = dir / "rounds.csv";
  if (config.emit_csv) {
    WriteFile(csv, RoundsCsv(result.training.history, config.data.n_groups));
  } else {
    fs::remove(csv, ec);
  }
  return result.summary;
}

std::string RoundRecordToJson(const RoundRecord& r) {
  json j;
  j["round"] = r.round;
  j["sampled_clients"] = r.sampled_clients;
  json clients = json::array();
  for (const auto& c : r.per_client) {
    clients.push_back({{"id", c.id},
                       {"norm_pre", c.norm_pre},
                       {"clip_factor", c.clip_factor},
                       {"clipped_by", ToString(c.clipped_by)},
                       {"biased", c.biased}});
  }
  j["per_client"] = std::move(clients);
  j["S_used"] = r.s_used;
  j["M_used"] = RealToJson(r.m_used);
  j["noise_std"] = r.noise_std;
  j["eps_round"] = RealToJson(r.eps_round);
  json groups = json::object();
  for (const auto& [g, acc] : r.eval.per_group_accuracy) {
    groups[std::to_string(g)] = acc;
  }
  j["eval"] = {{"accuracy", r.eval.accuracy},
               {"loss", r.eval.loss},
               {"per_group", std::move(groups)}};
  return j.dump();
}

RoundRecord RoundRecordFromJson(std::string_view line) {
  try {
    const json j = json::parse(line);
    RoundRecord r;
    r.round = j.at("round").get<int>();
    r.sampled_clients = j.at("sampled_clients").get<std::vector<int>>();
    for (const auto& c : j.at("per_client")) {
      r.per_client.push_back(
          {c.at("id").get<int>(), c.at("norm_pre").get<double>(),
           c.at("clip_factor").get<double>(),
           ClippedByFromString(c.at("clipped_by").get<std::string>()),
           c.at("biased").get<bool>()});
    }
    r.s_used = j.at("S_used").get<double>();
    r.m_used = RealFromJson(j.at("M_used"));
    r.noise_std = j.at("noise_std").get<double>();
    r.eps_round = RealFromJson(j.at("eps_round"));
    const json& eval = j.at("eval");
    r.eval.accuracy = eval.at("accuracy").get<double>();
    r.eval.loss = eval.at("loss").get<double>();
    for (const auto& [g, acc] : eval.at("per_group").items()) {
      r.eval.per_group_accuracy[std::stoi(g)] = acc.get<double>();
    }
    return r;
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed round record: ") + e.what());
  }
}

std::string SummaryToJson(const RunSummary& s) {
  json j;
  j["A_Fed"] = s.a_fed;
  j["A_Cen"] = s.a_cen;
  j["delta_acc"] = s.delta_acc;
  j["per_group_gap"] = s.per_group_gap;
  j["eps_total_nominal"] = RealToJson(s.eps_total_nominal);
  j["wall_ms"] = s.wall_ms;
  j["eps_note"] = kNominalEpsilonNote;
  return j.dump(2);
}

RunSummary SummaryFromJson(std::string_view text) {
  try {
    const json j = json::parse(text);
    RunSummary s;
    s.a_fed = j.at("A_Fed").get<double>();
    s.a_cen = j.at("A_Cen").get<double>();
    s.delta_acc = j.at("delta_acc").get<double>();
    s.per_group_gap = j.at("per_group_gap").get<double>();
    s.eps_total_nominal = RealFromJson(j.at("eps_total_nominal"));
    s.wall_ms = j.at("wall_ms").get<std::int64_t>();
    return s;
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed summary: ") + e.what());
  }
}

RunSummary LoadSummary(const std::string& run_dir) {
  const fs::path path = fs::path(run_dir) / "summary.json";
  return SummaryFromJson(ReadFile(path));
}

std::vector<RoundRecord> LoadRounds(const std::string& run_dir) {
  std::istringstream in(ReadFile(fs::path(run_dir) / "rounds.jsonl"));
  std::vector<RoundRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) records.push_back(RoundRecordFromJson(line));
  }
  return records;
}

const std::vector<std::string>& ComparisonColumns() {
  static const std::vector<std::string> columns = {
      "run",           "A_Fed",             "A_Cen",
      "delta_acc",     "per_group_gap",     "eps_total_nominal",
      "A_Fed_minus_first"};
  return columns;
}

std::vector<ComparisonRow> CompareRuns(
    const std::vector<std::pair<std::string, RunSummary>>& runs) {
  if (runs.size() < 2) throw UsageError("comparison needs at least two runs");
  std::vector<ComparisonRow> rows;
  const double first = runs.front().second.a_fed;
  for (const auto& [name, summary] : runs) {
    rows.push_back({name, summary, summary.a_fed - first});
  }
  return rows;
}

std::string FormatComparisonTable(const std::vector<ComparisonRow>& rows) {
  std::size_t name_width = 3;
  for (const auto& r : rows) name_width = std::max(name_width, r.run.size());
  std::ostringstream out;
  const auto& cols = ComparisonColumns();
  out << std::left << std::setw(static_cast<int>(name_width)) << cols[0];
  for (std::size_t c = 1; c < cols.size(); ++c) {
    out << "  " << std::right << std::setw(18) << cols[c];
  }
  out << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(name_width)) << r.run;
    for (double v : {r.summary.a_fed, r.summary.a_cen, r.summary.delta_acc,
                     r.summary.per_group_gap, r.summary.eps_total_nominal,
                     r.a_fed_minus_first}) {
      std::ostringstream cell;
      if (std::isinf(v)) {
        cell << "inf";
      } else {
        cell << std::fixed << std::setprecision(6) << v;
      }
      out << "  " << std::right << std::setw(18) << cell.str();
    }
    out << '\n';
  }
  return out.str();
}

std::string ComparisonToCsv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  const auto& cols = ComparisonColumns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    out << (c ? "," : "") << cols[c];
  }
  out << '\n';
  for (const auto& r : rows) {
    if (r.run.find_first_of(",\n") != std::string::npos) {
      throw UsageError("run name '" + r.run + "' cannot be written to csv");
    }
    out << r.run << ',' << FormatReal(r.summary.a_fed) << ','
        << FormatReal(r.summary.a_cen) << ','
        << FormatReal(r.summary.delta_acc) << ','
        << FormatReal(r.summary.per_group_gap) << ','
        << FormatReal(r.summary.eps_total_nominal) << ','
        << FormatReal(r.a_fed_minus_first) << '\n';
  }
  return out.str();
}

std::vector<ComparisonRow> ComparisonFromCsv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || SplitCsvLine(line) != ComparisonColumns()) {
    throw UsageError("comparison csv header does not match");
  }
  std::vector<ComparisonRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = SplitCsvLine(line);
    if (cells.size() != ComparisonColumns().size()) {
      throw UsageError("comparison csv row has wrong column count");
    }
    ComparisonRow row;
    row.run = cells[0];
    row.summary.a_fed = ParseCsvReal(cells[1]);
    row.summary.a_cen = ParseCsvReal(cells[2]);
    row.summary.delta_acc = ParseCsvReal(cells[3]);
    row.summary.per_group_gap = ParseCsvReal(cells[4]);
    row.summary.eps_total_nominal = ParseCsvReal(cells[5]);
    row.a_fed_minus_first = ParseCsvReal(cells[6]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fairdp
