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

#ifndef DPROUTE_HARNESS_H_
#define DPROUTE_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dproute/audit.h"
#include "dproute/baseline.h"
#include "dproute/demand.h"
#include "dproute/dp_sgd.h"
#include "dproute/network.h"
#include "dproute/objective.h"

namespace dproute {

// How policies are scored: at the average demand of the dataset, or as the
// exact mean cost over its days.
enum class Evaluation { kAverageDemand, kEmpirical };

std::string_view EvaluationName(Evaluation evaluation);
Evaluation ParseEvaluation(std::string_view name);

// Experiment settings, stored as JSON. Relative paths are resolved against
// the directory of the config file. Rates are per minute, so the
// regularizer weights are per-minute cost units: the hourly value 1e4
// becomes 1e4 / 60.
struct ExperimentConfig {
  std::string network_path = "../data/SiouxFalls_net.tntp";
  std::string trips_path = "../data/SiouxFalls_trips.tntp";
  double capacity_divisor = 60.0;  // link capacities per hour -> per minute
  double period_minutes = 60.0;
  std::size_t days = 50;
  std::vector<std::size_t> days_grid = {10, 25, 50};
  double alpha = 1e4 / 60.0;
  ConstantsConvention convention = ConstantsConvention::kExperimentalEigenvalue;
  double epsilon = 0.1;
  double delta = 0.1;
  std::vector<double> epsilon_grid = {0.01, 0.1, 0.5};
  std::vector<double> delta_grid = {0.1, 0.5};
  double sensitivity_factor = 2.0;
  std::vector<double> alpha_grid = {1e2 / 60.0, 1e3 / 60.0, 1e4 / 60.0};
  std::vector<double> sensitivity_factor_grid = {1.5, 2.0, 5.0};
  double demand_scale = 1.0;
  std::vector<double> demand_scale_grid = {0.5, 1.0, 1.5};
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double step_tolerance = 1e-6;
  double final_tolerance = 1e-8;
  double baseline_gap_tolerance = 1e-4;  // relative to the cost of the starting policy
  std::size_t baseline_max_iterations = 5000;
  Evaluation evaluation = Evaluation::kAverageDemand;
  std::size_t audit_trials = 20;
  std::string output_dir = "out";

  // Directory relative paths are resolved against; not serialized.
  std::filesystem::path base_dir;

  // Throws InputError on empty grids or out-of-range values.
  void Validate() const;
  std::filesystem::path Resolve(const std::string& path) const;
};

// Strict parser: unknown keys and wrong types are InputErrors. Missing keys
// keep their defaults.
ExperimentConfig ParseConfig(std::string_view json, const std::filesystem::path& base_dir);
ExperimentConfig LoadConfig(const std::filesystem::path& path);
// JSON text holding every field. With resolve_paths the file paths are
// written as absolute paths, so the text loads from anywhere.
std::string ConfigToJson(const ExperimentConfig& config, bool resolve_paths = false);

// Network, latency and mean demand for one setting of the sweep parameters.
struct Scenario {
  Network network;
  LatencyModel latency;
  DemandMatrix mean_demand;
};

Scenario LoadScenario(const ExperimentConfig& config);
Scenario LoadScenario(const ExperimentConfig& config, double sensitivity_factor,
                      double demand_scale);

ModelConstants ConstantsFor(const ExperimentConfig& config, const Scenario& scenario,
                            const DemandDataset& dataset, double alpha);

// Cost of x under the configured evaluation, regularized when alpha > 0.
double EvaluateCost(const BlockVector& x, const DemandDataset& dataset,
                    const DemandMatrix& average, const LatencyModel& latency, double alpha,
                    Evaluation evaluation);

// Baseline at `average` to the configured gap, relative to the cost of the
// free-flow policy. Frank-Wolfe when alpha = 0, continued by accelerated
// projected gradient if it stalls; the latter alone when alpha > 0. The
// trace covers both phases. Check `converged` on return.
FrankWolfeResult SolveBaseline(const ExperimentConfig& config, const Scenario& scenario,
                               const DemandMatrix& average, double alpha);

struct TrajectoryPoint {
  std::size_t iteration = 0;
  // Travel time of x_k over the unregularized baseline's travel time.
  double cost_ratio = 0.0;
  // Regularized cost of x_k over the regularized baseline's.
  double regularized_cost_ratio = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;  // k = 0..N
  double baseline_cost = 0.0;
  double regularized_baseline_cost = 0.0;
  double release_cost_ratio = 0.0;  // x_alg against the unregularized baseline
  double sigma = 0.0;
  ModelConstants constants;
};

// Samples N days from `seed`, runs the private solver from the free-flow
// policy and scores every iterate against both baselines.
Trajectory RunTrajectory(const ExperimentConfig& config, const Scenario& scenario,
                         std::size_t days, double alpha, std::uint64_t seed);

struct ConvergenceRow {
  std::size_t days = 0;
  TrajectoryPoint point;
};

// convergence.csv: N, iteration, cost_ratio, regularized_cost_ratio.
std::vector<ConvergenceRow> RunConvergence(const ExperimentConfig& config,
                                           const std::filesystem::path& out_dir);

struct PrivacyCostRow {
  double epsilon = 0.0;
  double delta = 0.0;
  double mean_sigma = 0.0;
  double increase_percent = 0.0;  // mean over seeds
};

// privacy_cost.csv: epsilon, delta, sigma, cost_increase_percent, sorted by
// (epsilon, delta). Each seed reuses one noiseless run and one noise draw
// across all cells, so cells differ only through sigma.
std::vector<PrivacyCostRow> RunPrivacyCost(const ExperimentConfig& config,
                                           const std::filesystem::path& out_dir);

struct SweepRow {
  double value = 0.0;
  TrajectoryPoint point;
};

struct SweepResult {
  std::vector<SweepRow> alpha;
  std::vector<SweepRow> sensitivity_factor;
  std::vector<SweepRow> demand_scale;
};

// sweep_alpha.csv, sweep_sensitivity_factor.csv, sweep_demand_scale.csv:
// value, iteration, cost_ratio, regularized_cost_ratio. Constants and
// baselines are recomputed for every scenario.
SweepResult RunSensitivitySweep(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir);

// Single private solve: dataset.csv, private_{pre,alg,trace}.csv.
PrivateSolution RunSolvePrivate(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir);

// Unregularized baseline: baseline_policy.csv and baseline_gap.csv.
FrankWolfeResult RunSolveBaseline(const ExperimentConfig& config,
                                  const std::filesystem::path& out_dir);

// Sensitivity audit on the configured scenario: audit.csv.
AuditReport RunAudit(const ExperimentConfig& config, std::size_t trials,
                     const std::filesystem::path& out_dir);

// Impossibility demo on the configured network with the trips of both
// endpoints of `od` removed: impossibility.csv (variant, base, adjacent).
ImpossibilityReport RunDemoImpossibility(const ExperimentConfig& config, OdPair od,
                                         const std::filesystem::path& out_dir);

// Path distributions of a policy CSV: paths.csv.
std::vector<PathDistribution> RunDecompose(const ExperimentConfig& config,
                                           const std::filesystem::path& policy_csv,
                                           const std::filesystem::path& out_dir);

// <name>_meta.json with the resolved config, the command and its outputs.
void WriteRunMetadata(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                      const std::string& name, const std::vector<std::string>& outputs,
                      const std::string& extra_json = "{}");

}  // namespace dproute

#endif  // DPROUTE_HARNESS_H_
