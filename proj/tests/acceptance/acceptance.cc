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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cli.h"
#include "dproute/audit.h"
#include "dproute/baseline.h"
#include "dproute/demand.h"
#include "dproute/dp_sgd.h"
#include "dproute/flow_polytope.h"
#include "dproute/harness.h"
#include "dproute/objective.h"
#include "test_util.h"

namespace dproute {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), fmt, args...);
  return buffer;
}

ExperimentConfig SiouxFallsConfig() {
  return LoadConfig(fs::path(DPROUTE_TEST_CONFIG_DIR) / "siouxfalls.json");
}

Eigen::VectorXd ToEigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Outcome SensitivityBoundHolds() {
  std::mt19937_64 gen(2024);
  const Network network = testing::RandomNetwork(5, 3, gen);
  AuditConfig config{network, testing::RandomLatency(network, gen),
                     testing::RandomDemand(5, 1.0, gen)};
  config.period = 60.0;
  config.alpha = 1.0;
  config.seed = 17;
  Outcome out{true, ""};
  for (std::size_t days : {10u, 50u}) {
    config.days = days;
    const AuditReport report = AuditSensitivity(config, 20);
    out.passed = out.passed && report.passed;
    out.detail += Format("N=%zu max ratio %.4f (slack %.1e); ", days, report.max_ratio,
                         report.max_slack);
  }
  return out;
}

Outcome ConvergesToBaseline() {
  const ExperimentConfig config = SiouxFallsConfig();
  const Scenario scenario = LoadScenario(config);
  const Trajectory t = RunTrajectory(config, scenario, 50, config.alpha, config.seed);
  const double ratio = t.points.back().cost_ratio;
  return {ratio >= 1.0 && ratio <= 1.05,
          Format("final ratio %.4f (regularized %.4f, released policy %.4f, sigma %.4g); "
                 "want [1.00, 1.05]",
                 ratio, t.points.back().regularized_cost_ratio, t.release_cost_ratio, t.sigma)};
}

Outcome PrivacyCostIsSmall(const fs::path& scratch) {
  const ExperimentConfig config = SiouxFallsConfig();
  const std::vector<PrivacyCostRow> rows = RunPrivacyCost(config, scratch / "privacy");
  bool small = true;
  bool monotone = true;
  std::string detail;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    small = small && rows[i].increase_percent <= 1.0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (rows[j].delta == rows[i].delta && rows[j].epsilon > rows[i].epsilon &&
          rows[j].increase_percent > rows[i].increase_percent) {
        monotone = false;
      }
    }
    detail += Format("(%.2g,%.2g)->%.3g%% ", rows[i].epsilon, rows[i].delta,
                     rows[i].increase_percent);
  }
  detail += Format("| within 1%%: %s, monotone in epsilon: %s", small ? "yes" : "no",
                   monotone ? "yes" : "no");
  return {small && monotone && rows.size() == 6, detail};
}

// Population objective under Poisson day counts: the mean of F over days
// adds sum_od (mean_od / T) x_od^T Q x_od to F at the mean demand.
BlockVector PopulationGradient(const BlockVector& x, const DemandMatrix& mean,
                               const LatencyModel& latency, double alpha, double period) {
  BlockVector g = Gradient(x, mean, latency, alpha);
  const int n = x.node_count();
  for (int o = 0; o < n; ++o) {
    for (int d = 0; d < n; ++d) {
      const double var = mean(o, d) / period;
      auto gb = g.block(OdPair{o, d});
      const auto xb = x.block(OdPair{o, d});
      for (int e = 0; e < x.edge_count(); ++e) gb[e] += 2.0 * var * latency.slope()[e] * xb[e];
    }
  }
  return g;
}

// Frank-Wolfe gap with a per-block shortest-path oracle.
double PopulationGap(const BlockVector& x, const BlockVector& g, const Network& network) {
  double gap = 0.0;
  const int n = network.node_count();
  for (int o = 0; o < n; ++o) {
    for (int d = 0; d < n; ++d) {
      if (o == d) continue;
      const auto gb = g.block(OdPair{o, d});
      const auto xb = x.block(OdPair{o, d});
      std::vector<double> costs(gb.begin(), gb.end());
      const double shift = -std::min(0.0, *std::min_element(costs.begin(), costs.end()));
      for (double& c : costs) c += shift;  // shortest paths need nonnegative costs
      const UnitOdFlow s = ShortestPathFlow({o, d}, costs, network);
      for (int e = 0; e < network.edge_count(); ++e) gap += gb[e] * (xb[e] - s.flow[e]);
    }
  }
  return gap;
}

Outcome ErrorScalesLikeInverseRoot() {
  std::mt19937_64 gen(404);
  // Bidirectional 4-cycle with both diagonals one way.
  const Network network(4, {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 3}, {3, 2}, {3, 0}, {0, 3},
                            {0, 2}, {1, 3}},
                        {2, 2, 3, 3, 2, 2, 1, 1, 4, 4}, {3, 3, 2, 2, 4, 4, 3, 3, 2, 2});
  const LatencyModel latency = AffineLatencyFrom(network, 2.0);
  const FlowPolytope polytope(network);
  DemandMatrix mean(4);
  for (int o = 0; o < 4; ++o) {
    for (int d = 0; d < 4; ++d) {
      if (o != d) mean.Set(o, d, 0.2 + 0.1 * ((3 * o + d) % 4));
    }
  }
  const double period = 60.0;
  const double alpha = 1.0;

  // x*: projected gradient on the population objective, certified by its gap.
  double q_max = latency.slope_norm();
  const double lipschitz =
      2.0 * (mean.SquaredNorm() + mean.MaxEntry() / period) * q_max + alpha;
  BlockVector star = FreeFlowPolicy(network);
  double gap = 0.0;
  for (int it = 0; it < 200000; ++it) {
    const BlockVector g = PopulationGradient(star, mean, latency, alpha, period);
    gap = PopulationGap(star, g, network);
    if (gap <= 1e-10) break;
    BlockVector step = star;
    for (std::size_t i = 0; i < step.size(); ++i) step.values()[i] -= g.values()[i] / lipschitz;
    star = polytope.ProjectPolicy(step, 1e-13);
  }
  if (gap > 1e-10) return {false, Format("reference solve stalled at gap %.3g", gap)};

  const std::vector<std::size_t> sizes = {25, 100, 400};
  std::vector<double> mean_error;
  SgdOptions options;
  options.step_tolerance = 1e-9;
  options.final_tolerance = 1e-9;
  for (std::size_t days : sizes) {
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const DemandDataset data = SampleDataset(mean, days, period, 1000 * days + seed);
      const ModelConstants k =
          ComputeConstants(network, latency, LambdaMax(data), alpha, period);
      const PrivateSolution sol = PrivateSgd(data, polytope, latency, k, {1.0, 0.1},
                                             FreeFlowPolicy(network), seed, options);
      total += sol.x_alg.DistanceTo(star);
    }
    mean_error.push_back(total / 20.0);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double lx = std::log(static_cast<double>(sizes[i]));
    const double ly = std::log(mean_error[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(sizes.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return {slope >= -0.9 && slope <= -0.25,
          Format("mean error %.4g, %.4g, %.4g at N = 25, 100, 400; slope %.3f, want [-0.9, -0.25]",
                 mean_error[0], mean_error[1], mean_error[2], slope)};
}

Outcome DistinguisherSeparates(const fs::path& scratch) {
  int runs = 0;
  int separated = 0;
  auto record = [&](const ImpossibilityReport& r) {
    ++runs;
    separated += r.Separated();
  };
  record(DemoImpossibility(testing::Triangle(), DemandMatrix(3), {0, 2}, 60.0));
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Network network = testing::RandomNetwork(7, 5, gen);
    DemandMatrix base = testing::RandomDemand(7, 2.0, gen);
    for (int u = 0; u < 7; ++u) {
      for (int endpoint : {1, 5}) {
        base.Set(endpoint, u, 0.0);
        base.Set(u, endpoint, 0.0);
      }
    }
    record(DemoImpossibility(network, base, {1, 5}, 60.0));
  }
  const ExperimentConfig config = SiouxFallsConfig();
  for (OdPair od : {OdPair{0, 19}, OdPair{9, 14}, OdPair{23, 2}}) {
    record(RunDemoImpossibility(config, od, scratch / "demo"));
  }
  return {separated == runs,
          Format("%d of %d adjacent pairs separated (full and total-flow releases)", separated,
                 runs)};
}

Outcome ProjectionMatchesOracle() {
  std::mt19937_64 gen(606);
  int checked = 0;
  double worst = 0.0;
  for (int m : {3, 5}) {
    const int n = m == 3 ? 3 : 4;
    std::uniform_int_distribution<int> node(0, n - 1);
    for (int made = 0; made < 60;) {
      std::vector<Edge> edges;
      while (static_cast<int>(edges.size()) < m) {
        const Edge e{node(gen), node(gen)};
        if (e.tail != e.head && std::find(edges.begin(), edges.end(), e) == edges.end()) {
          edges.push_back(e);
        }
      }
      const Network network(n, edges, std::vector<double>(m, 1.0), std::vector<double>(m, 1.0));
      const OdPair od{node(gen), node(gen)};
      const FlowPolytope polytope(network);
      if (od.origin == od.destination || !polytope.Reachable(od)) continue;
      ++made;
      const std::vector<double> v = testing::RandomVector(m, -1.0, 2.0, gen);
      const UnitOdFlow p = polytope.Project(v, od, 1e-10);
      const Eigen::VectorXd oracle = testing::BruteForceProjection(
          ToEigen(v), testing::Incidence(network), testing::UnitRhs(network, od));
      worst = std::max(worst, (ToEigen(p.flow) - oracle).norm());
      ++checked;
    }
  }
  return {worst <= 1e-6, Format("%d polytopes, worst distance %.2e", checked, worst)};
}

Outcome GradientsMatchDifferences() {
  std::mt19937_64 gen(707);
  int instances = 0;
  double worst = 0.0;
  for (int n : {3, 5}) {
    for (int trial = 0; trial < 60; ++trial) {
      const Network network = testing::RandomNetwork(n, 2, gen);
      const LatencyModel latency = testing::RandomLatency(network, gen);
      const DemandMatrix demand = testing::RandomDemand(n, 3.0, gen);
      BlockVector x(n, network.edge_count());
      const std::vector<double> r = testing::RandomVector(x.size(), -1.0, 1.0, gen);
      std::copy(r.begin(), r.end(), x.values().begin());
      const double alpha = 0.5;
      const BlockVector g = Gradient(x, demand, latency, alpha);
      const double h = 1e-5;
      double err2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x.values()[i];
        x.values()[i] = saved + h;
        const double up = RegularizedCost(x, demand, latency, alpha);
        x.values()[i] = saved - h;
        const double down = RegularizedCost(x, demand, latency, alpha);
        x.values()[i] = saved;
        const double diff = (up - down) / (2.0 * h) - g.values()[i];
        err2 += diff * diff;
      }
      worst = std::max(worst, std::sqrt(err2) / g.Norm());
      ++instances;
    }
  }
  return {worst <= 1e-5, Format("%d instances, worst relative error %.2e", instances, worst)};
}

Outcome AssumptionsHold() {
  std::mt19937_64 gen(808);
  int pairs = 0;
  int violations = 0;
  for (int n : {3, 4, 5}) {
    const Network network = testing::RandomNetwork(n, 3, gen);
    const FlowPolytope polytope(network);
    const LatencyModel latency = testing::RandomLatency(network, gen);
    for (int trial = 0; trial < 350; ++trial) {
      const DemandMatrix demand = testing::RandomDemand(n, 3.0, gen);
      const double alpha = 0.25 + trial % 4;
      const ModelConstants k = ComputeConstants(network, latency, demand.MaxEntry(), alpha, 60.0);
      const BlockVector x = testing::RandomFeasiblePolicy(polytope, gen);
      const BlockVector xp = testing::RandomFeasiblePolicy(polytope, gen);
      const BlockVector g = Gradient(x, demand, latency, alpha);
      double inner = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        inner += g.values()[i] * (xp.values()[i] - x.values()[i]);
      }
      const double d2 = std::pow(x.DistanceTo(xp), 2);
      const double fx = RegularizedCost(x, demand, latency, alpha);
      const double fxp = RegularizedCost(xp, demand, latency, alpha);
      const double slack = 1e-10 * std::max(1.0, std::fabs(fx));
      if (fxp < fx + inner + 0.5 * alpha * d2 - slack) ++violations;
      if (fxp > fx + inner + 0.5 * k.beta * d2 + slack) ++violations;
      ++pairs;
    }
  }
  double worst_eigen = 0.0;
  for (int n : {2, 3, 4}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Network network = testing::RandomNetwork(n, 1, gen);
      const LatencyModel latency = testing::RandomLatency(network, gen);
      const DemandMatrix demand = testing::RandomDemand(n, 3.0, gen);
      const int m = network.edge_count();
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, n * n * m);
      for (int k = 0; k < n * n; ++k) {
        b.block(0, k * m, m, m) = demand.rates()[k] * Eigen::MatrixXd::Identity(m, m);
      }
      const Eigen::VectorXd q = ToEigen(latency.slope());
      const Eigen::MatrixXd h = b.transpose() * q.asDiagonal() * b;
      const double dense =
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().maxCoeff();
      const double closed = demand.SquaredNorm() * latency.slope_norm();
      worst_eigen = std::max({worst_eigen, std::fabs(closed - dense) / dense,
                              std::fabs(KroneckerTopEigenvalue(demand, latency) - dense) / dense});
    }
  }
  return {pairs >= 1000 && violations == 0 && worst_eigen <= 1e-9,
          Format("%d pairs, %d inequality violations; eigenvalue identity worst relative "
                 "error %.2e",
                 pairs, violations, worst_eigen)};
}

Outcome AverageDemandApproximates() {
  const ExperimentConfig config = SiouxFallsConfig();
  const Scenario scenario = LoadScenario(config);
  double worst = 0.0;
  std::string detail;
  for (std::size_t days : config.days_grid) {
    const DemandDataset data =
        SampleDataset(scenario.mean_demand, days, config.period_minutes, config.seed + days);
    const DemandMatrix average = AverageDemand(data);
    const FrankWolfeResult base = SolveBaseline(config, scenario, average, 0.0);
    if (!base.converged) return {false, "baseline did not converge"};
    const double at_average = TravelTimeCost(base.policy, average, scenario.latency);
    const double empirical = EmpiricalCost(base.policy, data, scenario.latency, 0.0);
    const double rel = std::fabs(at_average - empirical) / empirical;
    worst = std::max(worst, rel);
    detail += Format("N=%zu %.2e; ", days, rel);
  }
  return {worst < 1e-4, detail + "want < 1e-4"};
}

Outcome CliIsByteReproducible(const fs::path& scratch) {
  fs::create_directories(scratch);
  testing::WriteSmallTntp(scratch);
  const fs::path config = scratch / "small.json";
  testing::WriteFile(config, testing::SmallConfigJson());
  const std::vector<std::vector<std::string>> commands = {
      {"solve-private"},
      {"solve-baseline"},
      {"audit", "--trials", "4"},
      {"demo-impossibility", "--origin", "2", "--destination", "5"},
      {"experiment", "convergence"},
      {"experiment", "privacy-cost"},
      {"experiment", "sweep"},
  };
  int files = 0;
  int mismatches = 0;
  int failures = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = scratch / ("run" + std::to_string(c) + "_" + std::to_string(rep));
      std::vector<std::string> args = {"dproute"};
      args.insert(args.end(), commands[c].begin(), commands[c].end());
      for (const std::string& a :
           {std::string("--config"), config.string(), std::string("--out-dir"), dir.string()}) {
        args.push_back(a);
      }
      if (commands[c][0] == "solve-baseline") {
        // Decompose the fresh baseline in the same directory.
        std::vector<const char*> argv;
        for (const std::string& a : args) argv.push_back(a.c_str());
        std::ostringstream sink;
        failures += RunCli(static_cast<int>(argv.size()), argv.data(), sink, sink) != 0;
        args = {"dproute", "decompose", "--config", config.string(), "--out-dir", dir.string(),
                "--policy", (dir / "baseline_policy.csv").string()};
      }
      std::vector<const char*> argv;
      for (const std::string& a : args) argv.push_back(a.c_str());
      std::ostringstream sink;
      failures += RunCli(static_cast<int>(argv.size()), argv.data(), sink, sink) != 0;
      dirs.push_back(dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      const fs::path twin = dirs[1] / entry.path().filename();
      if (!fs::exists(twin) ||
          testing::ReadFile(entry.path()) != testing::ReadFile(twin)) {
        ++mismatches;
      }
    }
  }
  return {failures == 0 && mismatches == 0 && files > 0,
          Format("%d CSV files compared across repeated runs, %d differ, %d runs failed", files,
                 mismatches, failures)};
}

}  // namespace
}  // namespace dproute

int main() {
  using dproute::Outcome;
  dproute::testing::TempDir scratch;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"sensitivity bound on adjacent datasets", dproute::SensitivityBoundHolds},
      {"Sioux Falls cost ratio to baseline at N=50", dproute::ConvergesToBaseline},
      {"privacy cost of the released policy",
       [&] { return dproute::PrivacyCostIsSmall(scratch.path()); }},
      {"error scaling with the number of days", dproute::ErrorScalesLikeInverseRoot},
      {"net-flow distinguisher on standard flows",
       [&] { return dproute::DistinguisherSeparates(scratch.path()); }},
      {"projection against brute-force oracle", dproute::ProjectionMatchesOracle},
      {"gradient against finite differences", dproute::GradientsMatchDifferences},
      {"convexity, smoothness and eigenvalue identity", dproute::AssumptionsHold},
      {"average-demand cost approximation", dproute::AverageDemandApproximates},
      {"byte-identical CLI reruns",
       [&] { return dproute::CliIsByteReproducible(scratch.path() / "cli"); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %zu %s: %s [%.1fs]\n", outcome.passed ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    failed += !outcome.passed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
