//
// Copyright 2026 The dproute Authors
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
//

#include "dproute/harness.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dproute/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

#ifndef DPROUTE_TEST_CONFIG_DIR
#error "DPROUTE_TEST_CONFIG_DIR must point at the shipped configs"
#endif

namespace dproute {
namespace {

class SmallHarnessTest : public ::testing::Test {
 protected:
  void SetUp() override {
    testing::WriteSmallTntp(dir_.path());
    testing::WriteFile(dir_.path() / "cfg.json", testing::SmallConfigJson());
    config_ = LoadConfig(dir_.path() / "cfg.json");
  }

  std::size_t CountRows(const std::filesystem::path& csv) const {
    const std::string text = testing::ReadFile(csv);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) - 1;
  }

  testing::TempDir dir_;
  ExperimentConfig config_;
};

TEST(ConfigTest, DefaultsRoundTrip) {
  const ExperimentConfig defaults;
  const ExperimentConfig parsed = ParseConfig(ConfigToJson(defaults), "/base");
  EXPECT_EQ(ConfigToJson(parsed), ConfigToJson(defaults));
  EXPECT_EQ(parsed.alpha, defaults.alpha);
  EXPECT_EQ(parsed.alpha_grid, defaults.alpha_grid);
  EXPECT_EQ(parsed.seeds, defaults.seeds);
  EXPECT_EQ(parsed.convention, defaults.convention);
}

TEST(ConfigTest, ShippedConfigMatchesDefaults) {
  const ExperimentConfig shipped =
      LoadConfig(std::filesystem::path(DPROUTE_TEST_CONFIG_DIR) / "siouxfalls.json");
  EXPECT_EQ(ConfigToJson(shipped), ConfigToJson(ExperimentConfig{}));
  EXPECT_TRUE(std::filesystem::exists(shipped.Resolve(shipped.network_path)));
  EXPECT_TRUE(std::filesystem::exists(shipped.Resolve(shipped.trips_path)));
}

TEST(ConfigTest, PartialFileKeepsDefaults) {
  const ExperimentConfig c = ParseConfig(R"({"days": 7, "epsilon_grid": [0.3]})", "/x");
  EXPECT_EQ(c.days, 7u);
  EXPECT_EQ(c.epsilon_grid, std::vector<double>{0.3});
  EXPECT_EQ(c.delta_grid, ExperimentConfig{}.delta_grid);
}

TEST(ConfigTest, RejectsBadInput) {
  EXPECT_THROW(ParseConfig(R"({"dayz": 7})", "/x"), InputError);
  EXPECT_THROW(ParseConfig(R"({"days": "seven"})", "/x"), InputError);
  EXPECT_THROW(ParseConfig(R"({"days": -1})", "/x"), InputError);
  EXPECT_THROW(ParseConfig(R"({"epsilon_grid": []})", "/x"), InputError);
  EXPECT_THROW(ParseConfig(R"({"delta": 1.5})", "/x"), InputError);
  EXPECT_THROW(ParseConfig(R"({"alpha": 0})", "/x"), InputError);
  EXPECT_THROW(ParseConfig(R"({"convention": "guess"})", "/x"), InputError);
  EXPECT_THROW(ParseConfig("{ not json", "/x"), InputError);
  EXPECT_THROW(LoadConfig("/nonexistent/cfg.json"), InputError);
}

TEST(ConfigTest, ResolvesRelativePaths) {
  const ExperimentConfig c = ParseConfig(R"({"network": "a/net.tntp"})", "/root/cfgs");
  EXPECT_EQ(c.Resolve(c.network_path), std::filesystem::path("/root/cfgs/a/net.tntp"));
  EXPECT_EQ(c.Resolve("/abs/file"), std::filesystem::path("/abs/file"));
}

TEST(EvaluationTest, NamesRoundTrip) {
  for (auto e : {Evaluation::kAverageDemand, Evaluation::kEmpirical}) {
    EXPECT_EQ(ParseEvaluation(EvaluationName(e)), e);
  }
  EXPECT_THROW(ParseEvaluation("median"), InputError);
}

TEST_F(SmallHarnessTest, EvaluationModes) {
  const Scenario scenario = LoadScenario(config_);
  const DemandDataset data = SampleDataset(scenario.mean_demand, 6, 60.0, 2);
  const DemandMatrix average = AverageDemand(data);
  const BlockVector x = FreeFlowPolicy(scenario.network);
  EXPECT_EQ(EvaluateCost(x, data, average, scenario.latency, 0.5, Evaluation::kEmpirical),
            EmpiricalCost(x, data, scenario.latency, 0.5));
  EXPECT_EQ(EvaluateCost(x, data, average, scenario.latency, 0.5, Evaluation::kAverageDemand),
            RegularizedCost(x, average, scenario.latency, 0.5));
}

TEST_F(SmallHarnessTest, ConvergenceRatiosRespectBaseline) {
  const auto rows = RunConvergence(config_, dir_.path() / "out");
  EXPECT_EQ(rows.size(), 5u + 9u);
  EXPECT_EQ(CountRows(dir_.path() / "out" / "convergence.csv"), rows.size());
  EXPECT_TRUE(std::filesystem::exists(dir_.path() / "out" / "convergence_meta.json"));
  for (const ConvergenceRow& row : rows) {
    EXPECT_GE(row.point.cost_ratio, 1.0 - config_.baseline_gap_tolerance);
    EXPECT_GE(row.point.regularized_cost_ratio, 1.0 - config_.baseline_gap_tolerance);
  }
}

TEST_F(SmallHarnessTest, TrajectoryWithoutCongestionMatchesBaseline) {
  ExperimentConfig c = config_;
  c.convention = ConstantsConvention::kPaperFormula;
  const Scenario scenario = LoadScenario(c, 1.0, 1.0);
  const Trajectory t = RunTrajectory(c, scenario, 8, 1e-6, 4);
  ASSERT_EQ(t.points.size(), 9u);
  EXPECT_NEAR(t.points.back().cost_ratio, 1.0, 1e-6);
}

TEST_F(SmallHarnessTest, PrivacyCostGrid) {
  const auto rows = RunPrivacyCost(config_, dir_.path() / "out");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].epsilon, 0.5);
  EXPECT_EQ(rows[1].epsilon, 1.0);
  EXPECT_NEAR(rows[1].mean_sigma, 0.5 * rows[0].mean_sigma, 1e-15);
  EXPECT_EQ(CountRows(dir_.path() / "out" / "privacy_cost.csv"), 2u);
}

TEST_F(SmallHarnessTest, SweepWritesOneFilePerParameter) {
  config_.days = 4;
  const SweepResult r = RunSensitivitySweep(config_, dir_.path() / "out");
  EXPECT_EQ(r.alpha.size(), 2u * 5u);
  EXPECT_EQ(r.sensitivity_factor.size(), 2u * 5u);
  EXPECT_EQ(r.demand_scale.size(), 2u * 5u);
  for (const char* name :
       {"sweep_alpha.csv", "sweep_sensitivity_factor.csv", "sweep_demand_scale.csv"}) {
    EXPECT_EQ(CountRows(dir_.path() / "out" / name), 10u) << name;
  }
}

TEST_F(SmallHarnessTest, SolveCommandsWriteArtifacts) {
  const auto out = dir_.path() / "out";
  const PrivateSolution sol = RunSolvePrivate(config_, out);
  EXPECT_EQ(sol.days, config_.days);
  const FrankWolfeResult base = RunSolveBaseline(config_, out);
  EXPECT_TRUE(base.converged);
  const auto paths = RunDecompose(config_, out / "baseline_policy.csv", out);
  EXPECT_FALSE(paths.empty());
  for (const char* name : {"dataset.csv", "private_pre.csv", "private_alg.csv",
                           "private_trace.csv", "baseline_policy.csv", "baseline_gap.csv",
                           "paths.csv", "solve_baseline_meta.json", "decompose_meta.json"}) {
    EXPECT_TRUE(std::filesystem::exists(out / name)) << name;
  }
}

TEST_F(SmallHarnessTest, MetadataRecordsResolvedConfig) {
  const auto out = dir_.path() / "out";
  RunSolveBaseline(config_, out);
  const std::string meta = testing::ReadFile(out / "solve_baseline_meta.json");
  EXPECT_NE(meta.find((dir_.path() / "small_net.tntp").string()), std::string::npos);
  EXPECT_NE(meta.find("\"baseline_gap_tolerance\""), std::string::npos);
}

TEST_F(SmallHarnessTest, AuditAndDemo) {
  const auto out = dir_.path() / "out";
  const AuditReport report = RunAudit(config_, 3, out);
  EXPECT_EQ(report.trials.size(), 3u);
  EXPECT_EQ(CountRows(out / "audit.csv"), 3u);
  const ImpossibilityReport demo = RunDemoImpossibility(config_, {0, 3}, out);
  EXPECT_TRUE(demo.Separated());
  EXPECT_EQ(testing::ReadFile(out / "impossibility.csv"),
            "variant,base_detected,adjacent_detected\nfull,false,true\ntotal_flow,false,true\n");
}

}  // namespace
}  // namespace dproute
