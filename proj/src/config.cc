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

#include "fairdp/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fairdp/errors.h"

namespace fairdp {
namespace {

namespace pt = boost::property_tree;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

template <typename Int>
Int ParseInteger(std::string_view key, std::string_view raw) {
  const std::string text = Trim(raw);
  Int value{};
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(key),
                      "expected an integer, got '" + text + "'");
  }
  return value;
}

double ParseReal(std::string_view key, std::string_view raw) {
  const std::string text = Trim(raw);
  if (text == "inf" || text == "+inf") return kInf;
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      std::isnan(value)) {
    throw ConfigError(std::string(key), "expected a real number, got '" +
                                            text + "'");
  }
  return value;
}

bool ParseBool(std::string_view key, std::string_view raw) {
  const std::string text = Trim(raw);
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(std::string(key),
                    "expected true or false, got '" + text + "'");
}

std::vector<int> ParseIntList(std::string_view key, std::string_view raw) {
  std::vector<int> out;
  const std::string text = Trim(raw);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    out.push_back(ParseInteger<int>(key, text.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

template <typename Enum, typename Fn>
Enum ParseEnum(std::string_view key, std::string_view raw, Fn from_string) {
  try {
    return from_string(Trim(raw));
  } catch (const UsageError& e) {
    throw ConfigError(std::string(key), e.what());
  }
}

std::string FormatReal(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string FormatIntList(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

struct KeyHandler {
  std::string key;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define FAIRDP_INT_KEY(name, field)                                         \
  KeyHandler {                                                              \
    name,                                                                   \
        [](ExperimentConfig& c, std::string_view v) {                       \
          c.field = ParseInteger<decltype(c.field)>(name, v);               \
        },                                                                  \
        [](const ExperimentConfig& c) { return std::to_string(c.field); } \
  }

#define FAIRDP_REAL_KEY(name, field)                                          \
  KeyHandler {                                                                \
    name, [](ExperimentConfig& c, std::string_view v) {                       \
      c.field = ParseReal(name, v);                                           \
    },                                                                        \
        [](const ExperimentConfig& c) { return FormatReal(c.field); }       \
  }

const std::vector<KeyHandler>& Handlers() {
  static const std::vector<KeyHandler> handlers = {
      FAIRDP_INT_KEY("experiment.seed", fed.seed),
      {"experiment.output_dir",
       [](ExperimentConfig& c, std::string_view v) { c.output_dir = Trim(v); },
       [](const ExperimentConfig& c) { return c.output_dir; }},
      {"experiment.emit_csv",
       [](ExperimentConfig& c, std::string_view v) {
         c.emit_csv = ParseBool("experiment.emit_csv", v);
       },
       [](const ExperimentConfig& c) {
         return std::string(c.emit_csv ? "true" : "false");
       }},
      FAIRDP_INT_KEY("data.n_examples", data.n_examples),
      FAIRDP_INT_KEY("data.n_features", data.n_features),
      FAIRDP_INT_KEY("data.n_classes", data.n_classes),
      FAIRDP_INT_KEY("data.n_groups", data.n_groups),
      FAIRDP_REAL_KEY("data.class_separation", data.class_separation),
      FAIRDP_REAL_KEY("data.group_correlation", data.group_correlation),
      {"partition.kind",
       [](ExperimentConfig& c, std::string_view v) {
         c.partition.kind = ParseEnum<PartitionKind>(
             "partition.kind", v, PartitionKindFromString);
       },
       [](const ExperimentConfig& c) {
         return std::string(ToString(c.partition.kind));
       }},
      FAIRDP_REAL_KEY("partition.alpha", partition.alpha),
      {"model.kind",
       [](ExperimentConfig& c, std::string_view v) {
         c.model.kind =
             ParseEnum<ModelKind>("model.kind", v, ModelKindFromString);
       },
       [](const ExperimentConfig& c) {
         return std::string(ToString(c.model.kind));
       }},
      FAIRDP_INT_KEY("model.hidden_units", model.hidden_units),
      FAIRDP_INT_KEY("federation.clients", fed.clients),
      FAIRDP_REAL_KEY("federation.sample_fraction", fed.sample_fraction),
      FAIRDP_INT_KEY("federation.rounds", fed.rounds),
      FAIRDP_INT_KEY("federation.epochs", fed.epochs),
      FAIRDP_REAL_KEY("federation.lr", fed.lr),
      FAIRDP_INT_KEY("federation.batch_size", fed.batch_size),
      {"federation.s_policy",
       [](ExperimentConfig& c, std::string_view v) {
         c.fed.s_policy =
             ParseEnum<SPolicy>("federation.s_policy", v, SPolicyFromString);
       },
       [](const ExperimentConfig& c) {
         return std::string(ToString(c.fed.s_policy));
       }},
      FAIRDP_REAL_KEY("federation.s_fixed", fed.s_fixed),
      FAIRDP_REAL_KEY("federation.m", fed.m),
      FAIRDP_INT_KEY("federation.workers", fed.workers),
      FAIRDP_REAL_KEY("privacy.sigma", fed.privacy.sigma),
      FAIRDP_REAL_KEY("privacy.delta_dp", fed.privacy.delta_dp),
      {"privacy.adjacency",
       [](ExperimentConfig& c, std::string_view v) {
         c.fed.privacy.adjacency = ParseEnum<Adjacency>(
             "privacy.adjacency", v, AdjacencyFromString);
       },
       [](const ExperimentConfig& c) {
         return std::string(ToString(c.fed.privacy.adjacency));
       }},
      {"bias.clients",
       [](ExperimentConfig& c, std::string_view v) {
         c.bias.clients = ParseIntList("bias.clients", v);
       },
       [](const ExperimentConfig& c) { return FormatIntList(c.bias.clients); }},
      {"bias.mode",
       [](ExperimentConfig& c, std::string_view v) {
         c.bias.kind = ParseEnum<BiasKind>("bias.mode", v, BiasKindFromString);
       },
       [](const ExperimentConfig& c) {
         return std::string(ToString(c.bias.kind));
       }},
      FAIRDP_REAL_KEY("bias.flip_prob", bias.flip.p),
      FAIRDP_INT_KEY("bias.target_group", bias.flip.target_group),
      FAIRDP_REAL_KEY("bias.factor", bias.scale.factor),
      FAIRDP_INT_KEY("bias.direction_seed", bias.scale.direction_seed),
  };
  return handlers;
}

#undef FAIRDP_INT_KEY
#undef FAIRDP_REAL_KEY

const KeyHandler* FindHandler(std::string_view key) {
  for (const auto& h : Handlers()) {
    if (h.key == key) return &h;
  }
  return nullptr;
}

void SyncModel(ExperimentConfig& config) {
  config.model.n_features = config.data.n_features;
  config.model.n_classes = config.data.n_classes;
}

ExperimentConfig Defaults() {
  ExperimentConfig c;
  SyncModel(c);
  return c;
}

}  // namespace

std::string_view ToString(BiasKind kind) {
  switch (kind) {
    case BiasKind::kNone:
      return "none";
    case BiasKind::kLabelFlip:
      return "label_flip";
    case BiasKind::kUpdateScale:
      return "update_scale";
  }
  return "unknown";
}

BiasKind BiasKindFromString(std::string_view name) {
  if (name == "none") return BiasKind::kNone;
  if (name == "label_flip") return BiasKind::kLabelFlip;
  if (name == "update_scale") return BiasKind::kUpdateScale;
  throw UsageError("unknown bias mode '" + std::string(name) + "'");
}

std::optional<BiasMode> BiasScenario::mode() const {
  switch (kind) {
    case BiasKind::kNone:
      return std::nullopt;
    case BiasKind::kLabelFlip:
      return flip;
    case BiasKind::kUpdateScale:
      return scale;
  }
  return std::nullopt;
}

void Validate(const ExperimentConfig& config) {
  auto wrap = [](const char* key, auto&& fn) {
    try {
      fn();
    } catch (const UsageError& e) {
      throw ConfigError(key, e.what());
    }
  };
  wrap("data", [&] { Validate(config.data); });
  wrap("model", [&] { Validate(config.model); });
  if (config.model.n_features != config.data.n_features ||
      config.model.n_classes != config.data.n_classes) {
    throw ConfigError("model", "model shape must match the data section");
  }
  Validate(config.fed);
  if (config.partition.kind == PartitionKind::kDirichletLabelSkew &&
      !(config.partition.alpha > 0.0 && std::isfinite(config.partition.alpha))) {
    throw ConfigError("partition.alpha", "alpha must be a finite value > 0");
  }
  const int n_train = std::max(1, config.data.n_examples * 4 / 5);
  if (config.fed.clients > n_train) {
    throw ConfigError("federation.clients",
                      "K exceeds the number of training examples");
  }
  std::set<int> seen;
  for (int id : config.bias.clients) {
    if (id < 0 || id >= config.fed.clients) {
      throw ConfigError("bias.clients", "client id " + std::to_string(id) +
                                            " outside [0, K)");
    }
    if (!seen.insert(id).second) {
      throw ConfigError("bias.clients",
                        "duplicate client id " + std::to_string(id));
    }
  }
  if (!(config.bias.flip.p >= 0.0 && config.bias.flip.p <= 1.0)) {
    throw ConfigError("bias.flip_prob", "flip probability must be in [0,1]");
  }
  if (config.bias.flip.target_group < 0 ||
      config.bias.flip.target_group >= config.data.n_groups) {
    throw ConfigError("bias.target_group", "target group outside [0, n_groups)");
  }
  if (!(config.bias.scale.factor > 0.0) ||
      !std::isfinite(config.bias.scale.factor)) {
    throw ConfigError("bias.factor", "factor must be a finite value > 0");
  }
  if (config.output_dir.empty()) {
    throw ConfigError("experiment.output_dir", "output_dir must not be empty");
  }
}

bool UnbiasedMajority(const ExperimentConfig& config) {
  if (config.bias.kind == BiasKind::kNone) return true;
  return 2 * static_cast<int>(config.bias.clients.size()) < config.fed.clients;
}

const std::vector<std::string>& PresetNames() {
  static const std::vector<std::string> names = {"fedavg_clean", "dp_only",
                                                 "fair_dp", "biased_attack"};
  return names;
}

ExperimentConfig Preset(std::string_view name) {
  ExperimentConfig c = Defaults();
  c.output_dir = "runs/" + std::string(name);
  if (name == "fedavg_clean") {
    c.fed.s_policy = SPolicy::kFixed;
    c.fed.s_fixed = 1e9;
    c.fed.m = 1e9;
    c.fed.privacy.sigma = 0.0;
  } else if (name == "dp_only") {
    c.fed.s_policy = SPolicy::kMedianAdaptive;
    c.fed.m = kInf;
    c.fed.privacy.sigma = 1.0;
  } else if (name == "fair_dp" || name == "biased_attack") {
    // Two of ten clients send 25x-scaled updates. Half of the clients are
    // sampled per round so the attackers never reach a majority of a round,
    // and the classes overlap so clean update norms settle instead of
    // decaying toward zero.
    c.data.class_separation = 2.0;
    c.fed.sample_fraction = 0.5;
    c.fed.s_policy = SPolicy::kMedianAdaptive;
    c.bias.clients = {0, 1};
    c.bias.kind = BiasKind::kUpdateScale;
    if (name == "fair_dp") {
      c.fed.m = 0.125;  // about 2x the median clean update norm
      c.fed.privacy.sigma = 1.0;
    } else {
      c.fed.m = kInf;
      c.fed.privacy.sigma = 0.0;
    }
  } else {
    throw ConfigError("experiment.preset",
                      "unknown preset '" + std::string(name) + "'");
  }
  return c;
}

ExperimentConfig ParseConfigText(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.message() +
                              " (line " + std::to_string(e.line()) + ")");
  }

  std::vector<std::pair<std::string, std::string>> entries;
  std::optional<std::string> preset;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) {
      throw ConfigError(section, "keys must live inside a [section]");
    }
    static const std::set<std::string> kSections = {
        "experiment", "data",    "partition", "model",
        "federation", "privacy", "bias"};
    if (!kSections.contains(section)) {
      throw ConfigError(section, "unknown section");
    }
    for (const auto& [key, value] : body) {
      const std::string path = section + "." + key;
      if (path == "experiment.preset") {
        preset = Trim(value.data());
        continue;
      }
      if (FindHandler(path) == nullptr) {
        throw ConfigError(path, "unknown key");
      }
      entries.emplace_back(path, value.data());
    }
  }

  ExperimentConfig config = preset ? Preset(*preset) : Defaults();
  if (!preset) {
    for (const char* required : {"federation.clients", "federation.rounds"}) {
      const bool present =
          std::any_of(entries.begin(), entries.end(),
                      [&](const auto& e) { return e.first == required; });
      if (!present) throw ConfigError(required, "missing required key");
    }
  }
  for (const auto& [path, value] : entries) {
    FindHandler(path)->set(config, value);
  }
  SyncModel(config);
  Validate(config);
  return config;
}

ExperimentConfig ParseConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open config");
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfigText(text.str());
}

std::string SerializeConfig(const ExperimentConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& h : Handlers()) {
    const auto dot = h.key.find('.');
    const std::string sec = h.key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << '[' << sec << "]\n";
      section = sec;
    }
    out << h.key.substr(dot + 1) << " = " << h.get(config) << '\n';
  }
  return out.str();
}

void SetConfigValue(ExperimentConfig& config, std::string_view key,
                    std::string_view value) {
  const KeyHandler* handler = FindHandler(key);
  if (handler == nullptr) throw ConfigError(std::string(key), "unknown key");
  handler->set(config, value);
  SyncModel(config);
  Validate(config);
}

}  // namespace fairdp
