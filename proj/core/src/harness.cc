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
#include <fstream>
#include <future>
#include <iterator>
#include <optional>
#include <sstream>
#include <type_traits>
#include <utility>

#include "dproute/csv.h"
#include "dproute/error.h"
#include "dproute/flow_polytope.h"
#include "json.hpp"

namespace dproute {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void BadField(std::string_view key, std::string_view expected) {
  throw InputError("config field '" + std::string(key) + "' must be " + std::string(expected));
}

void Read(const Json& v, std::string_view key, double& out) {
  if (!v.is_number()) BadField(key, "a number");
  out = v.get<double>();
}

template <typename T>
  requires std::is_unsigned_v<T>
void Read(const Json& v, std::string_view key, T& out) {
  if (!v.is_number_unsigned()) BadField(key, "a nonnegative integer");
  out = v.get<T>();
}

void Read(const Json& v, std::string_view key, std::string& out) {
  if (!v.is_string()) BadField(key, "a string");
  out = v.get<std::string>();
}

template <typename T>
void Read(const Json& v, std::string_view key, std::vector<T>& out) {
  if (!v.is_array()) BadField(key, "an array");
  out.clear();
  for (const Json& item : v) {
    T value{};
    Read(item, key, value);
    out.push_back(value);
  }
}

void RequireGrid(bool empty, std::string_view name) {
  if (empty) throw InputError("config grid '" + std::string(name) + "' is empty");
}

void RequirePositive(double value, std::string_view name) {
  if (!(value > 0.0)) throw InputError("config field '" + std::string(name) + "' must be positive");
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

template <typename T, typename F>
auto ParallelMap(const std::vector<T>& items, F f) {
  using R = decltype(f(items.front()));
  std::vector<std::future<R>> futures;
  futures.reserve(items.size());
  for (const T& item : items) {
    futures.push_back(std::async(std::launch::async, [&f, &item] { return f(item); }));
  }
  std::vector<R> results;
  results.reserve(items.size());
  for (auto& fut : futures) results.push_back(fut.get());
  return results;
}

void WriteTrajectoryCsv(const std::filesystem::path& path, std::string_view key_column,
                        const std::vector<SweepRow>& rows) {
  CsvWriter csv(path, {key_column, "iteration", "cost_ratio", "regularized_cost_ratio"});
  for (const SweepRow& row : rows) {
    csv << row.value << row.point.iteration << row.point.cost_ratio
        << row.point.regularized_cost_ratio;
    csv.EndRow();
  }
}

std::vector<SweepRow> SweepRows(const std::vector<double>& values,
                                const std::vector<Trajectory>& trajectories) {
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (const TrajectoryPoint& p : trajectories[i].points) rows.push_back({values[i], p});
  }
  return rows;
}

Json ConstantsJson(const ModelConstants& c) {
  return Json{{"convention", ConventionName(c.convention)},
              {"lambda_max", c.lambda_max},
              {"alpha", c.alpha},
              {"beta", c.beta},
              {"C", c.C},
              {"K", c.K},
              {"T", c.T}};
}

}  // namespace

std::string_view EvaluationName(Evaluation evaluation) {
  return evaluation == Evaluation::kAverageDemand ? "average-demand" : "empirical";
}

Evaluation ParseEvaluation(std::string_view name) {
  if (name == "average-demand") return Evaluation::kAverageDemand;
  if (name == "empirical") return Evaluation::kEmpirical;
  throw InputError("unknown evaluation '" + std::string(name) +
                   "' (expected average-demand or empirical)");
}

void ExperimentConfig::Validate() const {
  if (network_path.empty() || trips_path.empty()) throw InputError("config needs data paths");
  RequirePositive(capacity_divisor, "capacity_divisor");
  RequirePositive(period_minutes, "period_minutes");
  if (days < 1) throw InputError("config field 'days' must be at least 1");
  RequireGrid(days_grid.empty(), "days_grid");
  for (std::size_t d : days_grid) {
    if (d < 1) throw InputError("config grid 'days_grid' holds a zero");
  }
  RequirePositive(alpha, "alpha");
  PrivacyParams{epsilon, delta}.Validate();
  RequireGrid(epsilon_grid.empty(), "epsilon_grid");
  RequireGrid(delta_grid.empty(), "delta_grid");
  for (double e : epsilon_grid) {
    for (double d : delta_grid) PrivacyParams{e, d}.Validate();
  }
  if (!(sensitivity_factor >= 1.0)) throw InputError("sensitivity_factor must be >= 1");
  RequireGrid(alpha_grid.empty(), "alpha_grid");
  for (double a : alpha_grid) RequirePositive(a, "alpha_grid");
  RequireGrid(sensitivity_factor_grid.empty(), "sensitivity_factor_grid");
  for (double f : sensitivity_factor_grid) {
    if (!(f >= 1.0)) throw InputError("sensitivity_factor_grid values must be >= 1");
  }
  RequirePositive(demand_scale, "demand_scale");
  RequireGrid(demand_scale_grid.empty(), "demand_scale_grid");
  for (double s : demand_scale_grid) RequirePositive(s, "demand_scale_grid");
  RequireGrid(seeds.empty(), "seeds");
  RequirePositive(step_tolerance, "step_tolerance");
  RequirePositive(final_tolerance, "final_tolerance");
  RequirePositive(baseline_gap_tolerance, "baseline_gap_tolerance");
  if (baseline_max_iterations < 1) throw InputError("baseline_max_iterations must be >= 1");
  if (audit_trials < 1) throw InputError("audit_trials must be >= 1");
}

std::filesystem::path ExperimentConfig::Resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.lexically_normal();
  return (base_dir / p).lexically_normal();
}

ExperimentConfig ParseConfig(std::string_view json, const std::filesystem::path& base_dir) {
  Json root;
  try {
    root = Json::parse(json.begin(), json.end());
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw InputError("config must be a JSON object");
  ExperimentConfig c;
  c.base_dir = base_dir;
  for (const auto& [key, v] : root.items()) {
    if (key == "network") Read(v, key, c.network_path);
    else if (key == "trips") Read(v, key, c.trips_path);
    else if (key == "capacity_divisor") Read(v, key, c.capacity_divisor);
    else if (key == "period_minutes") Read(v, key, c.period_minutes);
    else if (key == "days") Read(v, key, c.days);
    else if (key == "days_grid") Read(v, key, c.days_grid);
    else if (key == "alpha") Read(v, key, c.alpha);
    else if (key == "convention") {
      std::string name;
      Read(v, key, name);
      c.convention = ParseConvention(name);
    } else if (key == "epsilon") Read(v, key, c.epsilon);
    else if (key == "delta") Read(v, key, c.delta);
    else if (key == "epsilon_grid") Read(v, key, c.epsilon_grid);
    else if (key == "delta_grid") Read(v, key, c.delta_grid);
    else if (key == "sensitivity_factor") Read(v, key, c.sensitivity_factor);
    else if (key == "alpha_grid") Read(v, key, c.alpha_grid);
    else if (key == "sensitivity_factor_grid") Read(v, key, c.sensitivity_factor_grid);
    else if (key == "demand_scale") Read(v, key, c.demand_scale);
    else if (key == "demand_scale_grid") Read(v, key, c.demand_scale_grid);
    else if (key == "seed") Read(v, key, c.seed);
    else if (key == "seeds") Read(v, key, c.seeds);
    else if (key == "step_tolerance") Read(v, key, c.step_tolerance);
    else if (key == "final_tolerance") Read(v, key, c.final_tolerance);
    else if (key == "baseline_gap_tolerance") Read(v, key, c.baseline_gap_tolerance);
    else if (key == "baseline_max_iterations") Read(v, key, c.baseline_max_iterations);
    else if (key == "evaluation") {
      std::string name;
      Read(v, key, name);
      c.evaluation = ParseEvaluation(name);
    } else if (key == "audit_trials") Read(v, key, c.audit_trials);
    else if (key == "output_dir") Read(v, key, c.output_dir);
    else throw InputError("unknown config field '" + key + "'");
  }
  c.Validate();
  return c;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str(), std::filesystem::absolute(path).parent_path());
}

std::string ConfigToJson(const ExperimentConfig& c, bool resolve_paths) {
  auto path = [&](const std::string& p) {
    return resolve_paths ? std::filesystem::absolute(c.Resolve(p)).string() : p;
  };
  Json j;
  j["network"] = path(c.network_path);
  j["trips"] = path(c.trips_path);
  j["capacity_divisor"] = c.capacity_divisor;
  j["period_minutes"] = c.period_minutes;
  j["days"] = c.days;
  j["days_grid"] = c.days_grid;
  j["alpha"] = c.alpha;
  j["convention"] = ConventionName(c.convention);
  j["epsilon"] = c.epsilon;
  j["delta"] = c.delta;
  j["epsilon_grid"] = c.epsilon_grid;
  j["delta_grid"] = c.delta_grid;
  j["sensitivity_factor"] = c.sensitivity_factor;
  j["alpha_grid"] = c.alpha_grid;
  j["sensitivity_factor_grid"] = c.sensitivity_factor_grid;
  j["demand_scale"] = c.demand_scale;
  j["demand_scale_grid"] = c.demand_scale_grid;
  j["seed"] = c.seed;
  j["seeds"] = c.seeds;
  j["step_tolerance"] = c.step_tolerance;
  j["final_tolerance"] = c.final_tolerance;
  j["baseline_gap_tolerance"] = c.baseline_gap_tolerance;
  j["baseline_max_iterations"] = c.baseline_max_iterations;
  j["evaluation"] = EvaluationName(c.evaluation);
  j["audit_trials"] = c.audit_trials;
  j["output_dir"] = path(c.output_dir);
  return j.dump(2) + "\n";
}

Scenario LoadScenario(const ExperimentConfig& config) {
  return LoadScenario(config, config.sensitivity_factor, config.demand_scale);
}

Scenario LoadScenario(const ExperimentConfig& config, double sensitivity_factor,
                      double demand_scale) {
  Network network = ReadTntpNetworkFile(config.Resolve(config.network_path).string())
                        .WithCapacityDivisor(config.capacity_divisor);
  LatencyModel latency = AffineLatencyFrom(network, sensitivity_factor);
  DemandMatrix mean = ReadTntpTripsFile(config.Resolve(config.trips_path).string(),
                                        network.node_count())
                          .Scaled(demand_scale);
  if (mean.node_count() != network.node_count()) {
    throw InputError("trips file has more zones than the network has nodes");
  }
  return {std::move(network), std::move(latency), std::move(mean)};
}

ModelConstants ConstantsFor(const ExperimentConfig& config, const Scenario& scenario,
                            const DemandDataset& dataset, double alpha) {
  const double lambda_max = LambdaMax(dataset);
  if (config.convention == ConstantsConvention::kExperimentalEigenvalue) {
    return ExperimentalConstants(scenario.network, scenario.latency, AverageDemand(dataset),
                                 lambda_max, alpha, dataset.period());
  }
  return ComputeConstants(scenario.network, scenario.latency, lambda_max, alpha,
                          dataset.period());
}

double EvaluateCost(const BlockVector& x, const DemandDataset& dataset,
                    const DemandMatrix& average, const LatencyModel& latency, double alpha,
                    Evaluation evaluation) {
  if (evaluation == Evaluation::kEmpirical) return EmpiricalCost(x, dataset, latency, alpha);
  return RegularizedCost(x, average, latency, alpha);
}

FrankWolfeResult SolveBaseline(const ExperimentConfig& config, const Scenario& scenario,
                               const DemandMatrix& average, double alpha) {
  const BlockVector x0 = FreeFlowPolicy(scenario.network);
  const double start_cost = RegularizedCost(x0, average, scenario.latency, alpha);
  const double gap_tol = config.baseline_gap_tolerance * std::max(start_cost, 1e-300);
  std::optional<FrankWolfeResult> fw;
  if (alpha == 0.0) {
    fw = FrankWolfeSolve(average, scenario.network, scenario.latency, alpha, gap_tol,
                         config.baseline_max_iterations, x0);
    if (fw->converged) return *std::move(fw);
  }
  // Frank-Wolfe stalls once the optimum sits on a face; finish from its iterate.
  FrankWolfeResult pg = ProjectedGradientSolve(
      average, FlowPolytope(scenario.network), scenario.latency, alpha, gap_tol,
      config.baseline_max_iterations, fw ? std::optional<BlockVector>(fw->policy) : x0);
  if (fw) {
    const std::size_t offset = fw->trace.size();
    for (FrankWolfeStep& step : pg.trace) {
      step.iteration += offset;
      fw->trace.push_back(step);
    }
    pg.trace = std::move(fw->trace);
  }
  return pg;
}

Trajectory RunTrajectory(const ExperimentConfig& config, const Scenario& scenario,
                         std::size_t days, double alpha, std::uint64_t seed) {
  const DemandDataset dataset =
      SampleDataset(scenario.mean_demand, days, config.period_minutes, seed);
  const DemandMatrix average = AverageDemand(dataset);
  const LatencyModel& latency = scenario.latency;
  Trajectory out;
  out.constants = ConstantsFor(config, scenario, dataset, alpha);

  const FrankWolfeResult plain = SolveBaseline(config, scenario, average, 0.0);
  const FrankWolfeResult regularized = SolveBaseline(config, scenario, average, alpha);
  if (!plain.converged || !regularized.converged) {
    throw NumericalError("baseline did not reach its gap tolerance",
                         std::max(plain.gap, regularized.gap));
  }
  out.baseline_cost =
      EvaluateCost(plain.policy, dataset, average, latency, 0.0, config.evaluation);
  out.regularized_baseline_cost =
      EvaluateCost(regularized.policy, dataset, average, latency, alpha, config.evaluation);

  const FlowPolytope polytope(scenario.network);
  SgdOptions options;
  options.step_tolerance = config.step_tolerance;
  options.final_tolerance = config.final_tolerance;
  options.on_iterate = [&](std::size_t k, const BlockVector& x) {
    TrajectoryPoint p;
    p.iteration = k;
    p.cost_ratio =
        EvaluateCost(x, dataset, average, latency, 0.0, config.evaluation) / out.baseline_cost;
    p.regularized_cost_ratio =
        EvaluateCost(x, dataset, average, latency, alpha, config.evaluation) /
        out.regularized_baseline_cost;
    out.points.push_back(p);
  };
  const PrivateSolution solution =
      PrivateSgd(dataset, polytope, latency, out.constants, {config.epsilon, config.delta},
                 FreeFlowPolicy(scenario.network), seed, options);
  out.sigma = solution.sigma;
  out.release_cost_ratio =
      EvaluateCost(solution.x_alg, dataset, average, latency, 0.0, config.evaluation) /
      out.baseline_cost;
  return out;
}

std::vector<ConvergenceRow> RunConvergence(const ExperimentConfig& config,
                                           const std::filesystem::path& out_dir) {
  config.Validate();
  std::filesystem::create_directories(out_dir);
  const Scenario scenario = LoadScenario(config);
  const std::vector<Trajectory> runs = ParallelMap(config.days_grid, [&](std::size_t days) {
    return RunTrajectory(config, scenario, days, config.alpha, config.seed);
  });

  std::vector<ConvergenceRow> rows;
  CsvWriter csv(out_dir / "convergence.csv",
                {"N", "iteration", "cost_ratio", "regularized_cost_ratio"});
  Json details = Json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (const TrajectoryPoint& p : runs[i].points) {
      rows.push_back({config.days_grid[i], p});
      csv << config.days_grid[i] << p.iteration << p.cost_ratio << p.regularized_cost_ratio;
      csv.EndRow();
    }
    details.push_back({{"N", config.days_grid[i]},
                       {"final_cost_ratio", runs[i].points.back().cost_ratio},
                       {"final_regularized_cost_ratio",
                        runs[i].points.back().regularized_cost_ratio},
                       {"release_cost_ratio", runs[i].release_cost_ratio},
                       {"baseline_cost", runs[i].baseline_cost},
                       {"regularized_baseline_cost", runs[i].regularized_baseline_cost},
                       {"sigma", runs[i].sigma},
                       {"constants", ConstantsJson(runs[i].constants)}});
  }
  WriteRunMetadata(config, out_dir, "convergence", {"convergence.csv"},
                   Json{{"runs", details}}.dump());
  return rows;
}

std::vector<PrivacyCostRow> RunPrivacyCost(const ExperimentConfig& config,
                                           const std::filesystem::path& out_dir) {
  config.Validate();
  std::filesystem::create_directories(out_dir);
  const Scenario scenario = LoadScenario(config);
  std::vector<double> epsilons = config.epsilon_grid;
  std::vector<double> deltas = config.delta_grid;
  std::sort(epsilons.begin(), epsilons.end());
  std::sort(deltas.begin(), deltas.end());
  epsilons.erase(std::unique(epsilons.begin(), epsilons.end()), epsilons.end());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());

  struct Cell {
    double sigma;
    double increase;
  };
  const auto per_seed = ParallelMap(config.seeds, [&](std::uint64_t seed) {
    const DemandDataset dataset =
        SampleDataset(scenario.mean_demand, config.days, config.period_minutes, seed);
    const DemandMatrix average = AverageDemand(dataset);
    const ModelConstants constants = ConstantsFor(config, scenario, dataset, config.alpha);
    const FlowPolytope polytope(scenario.network);
    SgdOptions options;
    options.step_tolerance = config.step_tolerance;
    options.final_tolerance = config.final_tolerance;
    options.sigma_override = 0.0;
    const PrivateSolution noiseless =
        PrivateSgd(dataset, polytope, scenario.latency, constants, {config.epsilon, config.delta},
                   FreeFlowPolicy(scenario.network), seed, options);
    const double pre = EvaluateCost(noiseless.x_pre, dataset, average, scenario.latency, 0.0,
                                    config.evaluation);
    std::vector<Cell> cells;
    for (double e : epsilons) {
      for (double d : deltas) {
        const double sigma = GaussianNoiseScale(constants, config.days, {e, d});
        const BlockVector released =
            ReleasePolicy(noiseless.x_pre, polytope, sigma, seed, config.final_tolerance);
        const double post =
            EvaluateCost(released, dataset, average, scenario.latency, 0.0, config.evaluation);
        cells.push_back({sigma, 100.0 * (post - pre) / pre});
      }
    }
    return cells;
  });

  std::vector<PrivacyCostRow> rows;
  CsvWriter csv(out_dir / "privacy_cost.csv",
                {"epsilon", "delta", "sigma", "cost_increase_percent"});
  const double count = static_cast<double>(per_seed.size());
  std::size_t cell = 0;
  for (double e : epsilons) {
    for (double d : deltas) {
      PrivacyCostRow row{e, d, 0.0, 0.0};
      for (const auto& cells : per_seed) {
        row.mean_sigma += cells[cell].sigma / count;
        row.increase_percent += cells[cell].increase / count;
      }
      csv << row.epsilon << row.delta << row.mean_sigma << row.increase_percent;
      csv.EndRow();
      rows.push_back(row);
      ++cell;
    }
  }
  WriteRunMetadata(config, out_dir, "privacy_cost", {"privacy_cost.csv"});
  return rows;
}

SweepResult RunSensitivitySweep(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir) {
  config.Validate();
  std::filesystem::create_directories(out_dir);

  struct Job {
    int sweep;  // 0 alpha, 1 latency factor, 2 demand scale
    double value;
  };
  std::vector<Job> jobs;
  for (double a : config.alpha_grid) jobs.push_back({0, a});
  for (double f : config.sensitivity_factor_grid) jobs.push_back({1, f});
  for (double s : config.demand_scale_grid) jobs.push_back({2, s});
  const std::vector<Trajectory> runs = ParallelMap(jobs, [&](const Job& job) {
    const double factor = job.sweep == 1 ? job.value : config.sensitivity_factor;
    const double scale = job.sweep == 2 ? job.value : config.demand_scale;
    const double alpha = job.sweep == 0 ? job.value : config.alpha;
    return RunTrajectory(config, LoadScenario(config, factor, scale), config.days, alpha,
                         config.seed);
  });

  const std::size_t na = config.alpha_grid.size();
  const std::size_t nf = config.sensitivity_factor_grid.size();
  const std::vector<Trajectory> alpha_runs(runs.begin(), runs.begin() + na);
  const std::vector<Trajectory> factor_runs(runs.begin() + na, runs.begin() + na + nf);
  const std::vector<Trajectory> scale_runs(runs.begin() + na + nf, runs.end());
  SweepResult result;
  result.alpha = SweepRows(config.alpha_grid, alpha_runs);
  result.sensitivity_factor = SweepRows(config.sensitivity_factor_grid, factor_runs);
  result.demand_scale = SweepRows(config.demand_scale_grid, scale_runs);
  WriteTrajectoryCsv(out_dir / "sweep_alpha.csv", "alpha", result.alpha);
  WriteTrajectoryCsv(out_dir / "sweep_sensitivity_factor.csv", "sensitivity_factor",
                     result.sensitivity_factor);
  WriteTrajectoryCsv(out_dir / "sweep_demand_scale.csv", "demand_scale", result.demand_scale);

  Json details = Json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    static constexpr const char* kNames[] = {"alpha", "sensitivity_factor", "demand_scale"};
    details.push_back({{"sweep", kNames[jobs[i].sweep]},
                       {"value", jobs[i].value},
                       {"final_cost_ratio", runs[i].points.back().cost_ratio},
                       {"constants", ConstantsJson(runs[i].constants)}});
  }
  WriteRunMetadata(config, out_dir, "sweep",
                   {"sweep_alpha.csv", "sweep_sensitivity_factor.csv", "sweep_demand_scale.csv"},
                   Json{{"runs", details}}.dump());
  return result;
}

PrivateSolution RunSolvePrivate(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir) {
  config.Validate();
  std::filesystem::create_directories(out_dir);
  const Scenario scenario = LoadScenario(config);
  const DemandDataset dataset =
      SampleDataset(scenario.mean_demand, config.days, config.period_minutes, config.seed);
  WriteDatasetCsv(dataset, out_dir / "dataset.csv");
  const ModelConstants constants = ConstantsFor(config, scenario, dataset, config.alpha);
  const FlowPolytope polytope(scenario.network);
  SgdOptions options;
  options.step_tolerance = config.step_tolerance;
  options.final_tolerance = config.final_tolerance;
  PrivateSolution solution =
      PrivateSgd(dataset, polytope, scenario.latency, constants, {config.epsilon, config.delta},
                 FreeFlowPolicy(scenario.network), config.seed, options);
  WritePrivateSolution(solution, scenario.network, out_dir, "private");
  WriteRunMetadata(config, out_dir, "solve_private",
                   {"dataset.csv", "private_pre.csv", "private_alg.csv", "private_trace.csv",
                    "private_meta.json"},
                   Json{{"sigma", solution.sigma}, {"constants", ConstantsJson(constants)}}.dump());
  return solution;
}

FrankWolfeResult RunSolveBaseline(const ExperimentConfig& config,
                                  const std::filesystem::path& out_dir) {
  config.Validate();
  std::filesystem::create_directories(out_dir);
  const Scenario scenario = LoadScenario(config);
  const DemandDataset dataset =
      SampleDataset(scenario.mean_demand, config.days, config.period_minutes, config.seed);
  const DemandMatrix average = AverageDemand(dataset);
  FrankWolfeResult result = SolveBaseline(config, scenario, average, 0.0);
  WritePolicyCsv(result.policy, scenario.network, out_dir / "baseline_policy.csv");
  WriteGapTraceCsv(result.trace, out_dir / "baseline_gap.csv");
  WriteRunMetadata(
      config, out_dir, "solve_baseline", {"baseline_policy.csv", "baseline_gap.csv"},
      Json{{"converged", result.converged},
           {"gap", result.gap},
           {"iterations", result.trace.size()},
           {"cost", TravelTimeCost(result.policy, average, scenario.latency)}}
          .dump());
  if (!result.converged) {
    throw NumericalError("baseline hit the iteration cap before its gap tolerance", result.gap);
  }
  return result;
}

AuditReport RunAudit(const ExperimentConfig& config, std::size_t trials,
                     const std::filesystem::path& out_dir) {
  config.Validate();
  std::filesystem::create_directories(out_dir);
  Scenario scenario = LoadScenario(config);
  AuditConfig audit{std::move(scenario.network), std::move(scenario.latency),
                    std::move(scenario.mean_demand)};
  audit.days = config.days;
  audit.period = config.period_minutes;
  audit.alpha = config.alpha;
  audit.convention = config.convention;
  audit.step_tolerance = config.step_tolerance;
  audit.final_tolerance = config.final_tolerance;
  audit.seed = config.seed;
  AuditReport report = AuditSensitivity(audit, trials);
  WriteAuditCsv(report, out_dir / "audit.csv");
  WriteRunMetadata(config, out_dir, "audit", {"audit.csv"},
                   Json{{"trials", trials},
                        {"max_ratio", report.max_ratio},
                        {"slack", report.max_slack},
                        {"passed", report.passed},
                        {"summary", report.Summary()}}
                       .dump());
  return report;
}

ImpossibilityReport RunDemoImpossibility(const ExperimentConfig& config, OdPair od,
                                         const std::filesystem::path& out_dir) {
  config.Validate();
  std::filesystem::create_directories(out_dir);
  const Scenario scenario = LoadScenario(config);
  const int n = scenario.network.node_count();
  if (od.origin < 0 || od.origin >= n || od.destination < 0 || od.destination >= n) {
    throw InputError("pair endpoints must lie in [1, " + std::to_string(n) + "]");
  }
  DemandMatrix base = scenario.mean_demand;
  for (int endpoint : {od.origin, od.destination}) {
    for (int u = 0; u < n; ++u) {
      base.Set(endpoint, u, 0.0);
      base.Set(u, endpoint, 0.0);
    }
  }
  const ImpossibilityReport report =
      DemoImpossibility(scenario.network, base, od, config.period_minutes);
  {
    CsvWriter csv(out_dir / "impossibility.csv", {"variant", "base_detected", "adjacent_detected"});
    csv << "full" << (report.detected_base ? "true" : "false")
        << (report.detected_adjacent ? "true" : "false");
    csv.EndRow();
    csv << "total_flow" << (report.detected_base_total ? "true" : "false")
        << (report.detected_adjacent_total ? "true" : "false");
    csv.EndRow();
  }
  WriteRunMetadata(config, out_dir, "demo_impossibility", {"impossibility.csv"},
                   Json{{"origin", od.origin + 1},
                        {"destination", od.destination + 1},
                        {"separated", report.Separated()},
                        {"summary", report.Summary()}}
                       .dump());
  return report;
}

std::vector<PathDistribution> RunDecompose(const ExperimentConfig& config,
                                           const std::filesystem::path& policy_csv,
                                           const std::filesystem::path& out_dir) {
  config.Validate();
  std::filesystem::create_directories(out_dir);
  const Scenario scenario = LoadScenario(config);
  const BlockVector policy = ReadPolicyCsv(policy_csv, scenario.network);
  std::vector<PathDistribution> distributions;
  for (std::size_t i = 0; i < policy.block_count(); ++i) {
    const OdPair od = policy.PairOf(i);
    if (od.origin == od.destination) continue;
    const auto block = policy.block(i);
    if (std::all_of(block.begin(), block.end(), [](double v) { return v == 0.0; })) continue;
    distributions.push_back(
        DecomposeFlow(UnitOdFlow{od, std::vector<double>(block.begin(), block.end())},
                      scenario.network));
  }
  WritePathDistributionsCsv(distributions, scenario.network, out_dir / "paths.csv");
  WriteRunMetadata(config, out_dir, "decompose", {"paths.csv"},
                   Json{{"policy", std::filesystem::absolute(policy_csv).string()},
                        {"pairs", distributions.size()}}
                       .dump());
  return distributions;
}

void WriteRunMetadata(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                      const std::string& name, const std::vector<std::string>& outputs,
                      const std::string& extra_json) {
  Json meta;
  meta["command"] = name;
  meta["config"] = Json::parse(ConfigToJson(config, true));
  meta["outputs"] = outputs;
  meta["details"] = Json::parse(extra_json);
  WriteText(out_dir / (name + "_meta.json"), meta.dump(2) + "\n");
}

}  // namespace dproute
