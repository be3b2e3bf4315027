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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "fairdp/errors.h"
#include "gtest/gtest.h"

namespace fairdp {
namespace {

constexpr char kMinimal[] =
    "[federation]\n"
    "clients = 4\n"
    "rounds = 3\n";

std::string KeyOf(const std::string& text) {
  try {
    ParseConfigText(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

TEST(ParseConfigTest, MinimalFileFillsDefaults) {
  const ExperimentConfig config = ParseConfigText(kMinimal);
  ExperimentConfig expected;
  expected.fed.clients = 4;
  expected.fed.rounds = 3;
  expected.model.n_features = expected.data.n_features;
  expected.model.n_classes = expected.data.n_classes;
  EXPECT_EQ(config, expected);
  EXPECT_EQ(config.fed.s_policy, SPolicy::kMedianAdaptive);
  EXPECT_TRUE(std::isinf(config.fed.m));
}

TEST(ParseConfigTest, ZeroSampleFractionRejected) {
  try {
    ParseConfigText(std::string(kMinimal) + "sample_fraction = 0\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "federation.sample_fraction");
    EXPECT_NE(std::string(e.what()).find("q must be in (0,1]"), std::string::npos);
  }
}

TEST(ParseConfigTest, NamedDiagnostics) {
  EXPECT_EQ(KeyOf("[federation]\nclients = 4\n"), "federation.rounds");
  EXPECT_EQ(KeyOf(std::string(kMinimal) + "lr = fast\n"), "federation.lr");
  EXPECT_EQ(KeyOf(std::string(kMinimal) + "epochs = 1.5\n"), "federation.epochs");
  EXPECT_EQ(KeyOf(std::string(kMinimal) + "colour = red\n"), "federation.colour");
  EXPECT_EQ(KeyOf(std::string(kMinimal) + "[extras]\nx = 1\n"), "extras");
  EXPECT_EQ(KeyOf(std::string(kMinimal) + "[model]\nkind = forest\n"), "model.kind");
  EXPECT_EQ(KeyOf(std::string(kMinimal) + "[bias]\nclients = 0,9\nmode = update_scale\n"),
            "bias.clients");
  EXPECT_EQ(KeyOf(std::string(kMinimal) + "[experiment]\npreset = nope\n"),
            "experiment.preset");
}

TEST(ParseConfigTest, InfinityAcceptedForBiasBound) {
  const auto config = ParseConfigText(std::string(kMinimal) + "m = inf\n");
  EXPECT_TRUE(std::isinf(config.fed.m));
  EXPECT_EQ(ParseConfigText(std::string(kMinimal) + "m = 0.25\n").fed.m, 0.25);
}

TEST(ParseConfigTest, PresetWithOverrides) {
  const auto config = ParseConfigText(
      "[experiment]\npreset = fair_dp\nseed = 9\n[federation]\nrounds = 7\n");
  ExperimentConfig expected = Preset("fair_dp");
  expected.fed.seed = 9;
  expected.fed.rounds = 7;
  EXPECT_EQ(config, expected);
}

TEST(ParseConfigTest, AllSections) {
  const auto config = ParseConfigText(
      "[experiment]\nseed = 3\noutput_dir = out/x\nemit_csv = true\n"
      "[data]\nn_examples = 500\nn_features = 4\nn_classes = 3\n"
      "class_separation = 2.5\n"
      "[partition]\nkind = dirichlet_label_skew\nalpha = 0.3\n"
      "[model]\nkind = mlp_1hidden\nhidden_units = 5\n"
      "[federation]\nclients = 5\nrounds = 2\ns_policy = fixed\ns_fixed = 0.5\n"
      "[privacy]\nsigma = 1.5\nadjacency = replace_one\n"
      "[bias]\nclients = 1, 3\nmode = label_flip\nflip_prob = 0.7\n"
      "target_group = 1\n");
  EXPECT_EQ(config.fed.seed, 3u);
  EXPECT_EQ(config.output_dir, "out/x");
  EXPECT_TRUE(config.emit_csv);
  EXPECT_EQ(config.model.n_features, 4);
  EXPECT_EQ(config.model.n_classes, 3);
  EXPECT_EQ(config.model.kind, ModelKind::kMlp1Hidden);
  EXPECT_EQ(config.model.hidden_units, 5);
  EXPECT_EQ(config.partition.kind, PartitionKind::kDirichletLabelSkew);
  EXPECT_EQ(config.partition.alpha, 0.3);
  EXPECT_EQ(config.fed.s_policy, SPolicy::kFixed);
  EXPECT_EQ(config.fed.s_fixed, 0.5);
  EXPECT_EQ(config.fed.privacy.adjacency, Adjacency::kReplaceOne);
  EXPECT_EQ(config.bias.clients, (std::vector<int>{1, 3}));
  EXPECT_EQ(config.bias.kind, BiasKind::kLabelFlip);
  ASSERT_TRUE(config.bias.mode().has_value());
  EXPECT_EQ(std::get<LabelFlip>(*config.bias.mode()), (LabelFlip{0.7, 1}));
}

TEST(SerializeConfigTest, RoundTrips) {
  for (const std::string& name : PresetNames()) {
    ExperimentConfig config = Preset(name);
    config.fed.lr = 0.1 + 1e-17;
    config.fed.seed = 123456789012345ULL;
    EXPECT_EQ(ParseConfigText(SerializeConfig(config)), config) << name;
  }
}

TEST(SerializeConfigTest, FileRoundTrip) {
  const ExperimentConfig config = Preset("biased_attack");
  const auto path = std::filesystem::temp_directory_path() / "fairdp_config_test.ini";
  {
    std::ofstream out(path);
    out << SerializeConfig(config);
  }
  EXPECT_EQ(ParseConfig(path.string()), config);
  std::filesystem::remove(path);
  EXPECT_THROW(ParseConfig(path.string()), IoError);
}

TEST(SetConfigValueTest, OverridesOneKey) {
  ExperimentConfig config = Preset("dp_only");
  SetConfigValue(config, "federation.m", "0.5");
  EXPECT_EQ(config.fed.m, 0.5);
  SetConfigValue(config, "privacy.sigma", "2");
  EXPECT_EQ(config.fed.privacy.sigma, 2.0);
  SetConfigValue(config, "data.n_features", "7");
  EXPECT_EQ(config.model.n_features, 7);
  EXPECT_THROW(SetConfigValue(config, "federation.nothing", "1"), ConfigError);
}

TEST(PresetTest, AllPresetsValid) {
  EXPECT_EQ(PresetNames().size(), 4u);
  for (const std::string& name : PresetNames()) {
    EXPECT_NO_THROW(Validate(Preset(name))) << name;
    EXPECT_TRUE(UnbiasedMajority(Preset(name))) << name;
  }
  EXPECT_THROW(Preset("unknown"), ConfigError);
}

TEST(ValidateTest, UnbiasedMajority) {
  ExperimentConfig config = Preset("biased_attack");
  config.bias.clients = {0, 1, 2, 3, 4};
  EXPECT_NO_THROW(Validate(config));
  EXPECT_FALSE(UnbiasedMajority(config));
  config.bias.clients = {0, 1, 2, 3};
  EXPECT_TRUE(UnbiasedMajority(config));
}

TEST(ValidateTest, RejectsBadValues) {
  ExperimentConfig config = Preset("fedavg_clean");
  config.bias.clients = {1, 1};
  config.bias.kind = BiasKind::kUpdateScale;
  EXPECT_THROW(Validate(config), ConfigError);
  config = Preset("fedavg_clean");
  config.fed.clients = 5000;
  EXPECT_THROW(Validate(config), ConfigError);
  config = Preset("fedavg_clean");
  config.data.n_classes = 1;
  EXPECT_THROW(Validate(config), ConfigError);
}

}  // namespace
}  // namespace fairdp
