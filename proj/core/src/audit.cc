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

#include "dproute/audit.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <thread>

#include "dproute/baseline.h"
#include "dproute/csv.h"
#include "dproute/dp_sgd.h"
#include "dproute/error.h"
#include "dproute/flow_polytope.h"
#include "dproute/rng.h"

namespace dproute {
namespace {

constexpr std::uint64_t kAuditStream = 0x6175646974;  // "audit"

ModelConstants ConstantsFor(const AuditConfig& config, double lambda_max) {
  if (config.convention == ConstantsConvention::kExperimentalEigenvalue) {
    return ExperimentalConstants(config.network, config.latency, config.mean_demand, lambda_max,
                                 config.alpha, config.period);
  }
  return ComputeConstants(config.network, config.latency, lambda_max, config.alpha,
                          config.period);
}

std::size_t UniformIndex(CounterRng& rng, std::size_t count) {
  return std::min(count - 1, static_cast<std::size_t>(rng.Uniform() * static_cast<double>(count)));
}

}  // namespace

double SensitivityBound(const ModelConstants& constants, std::size_t days) {
  return Sensitivity(constants, days);
}

double PreNoiseDistance(const AuditConfig& config, const DemandDataset& a,
                        const DemandDataset& b) {
  const double lambda_max = std::max(LambdaMax(a), LambdaMax(b));
  const ModelConstants constants = ConstantsFor(config, lambda_max);
  const FlowPolytope polytope(config.network);
  SgdOptions options;
  options.step_tolerance = config.step_tolerance;
  options.final_tolerance = config.final_tolerance;
  options.sigma_override = 0.0;
  const BlockVector x0 = FreeFlowPolicy(config.network);
  const PrivacyParams privacy;
  const PrivateSolution sa =
      PrivateSgd(a, polytope, config.latency, constants, privacy, x0, config.seed, options);
  const PrivateSolution sb =
      PrivateSgd(b, polytope, config.latency, constants, privacy, x0, config.seed, options);
  return sa.x_pre.DistanceTo(sb.x_pre);
}

AuditReport AuditSensitivity(const AuditConfig& config, std::size_t trials) {
  if (trials == 0) throw InputError("audit needs at least one trial");
  if (config.days == 0) throw InputError("audit needs at least one day");
  const int n = config.network.node_count();

  auto run_trial = [&config, n](std::size_t trial) {
    CounterRng rng(config.seed, kAuditStream + trial);
    const DemandDataset base =
        SampleDataset(config.mean_demand, config.days, config.period, rng.NextU64());
    AuditTrial result;
    result.trial = trial;
    result.day = UniformIndex(rng, config.days);
    const std::size_t pair = UniformIndex(rng, static_cast<std::size_t>(n) * (n - 1));
    const int o = static_cast<int>(pair / (n - 1));
    int d = static_cast<int>(pair % (n - 1));
    if (d >= o) ++d;
    result.od = {o, d};
    const bool can_remove = base.day(result.day)(o, d) >= 1.0 / config.period;
    result.direction =
        can_remove && rng.Uniform() < 0.5 ? Perturbation::kRemove : Perturbation::kAdd;
    const DemandDataset adjacent = MakeAdjacent(base, result.day, result.od, result.direction);

    const double lambda_max = std::max(LambdaMax(base), LambdaMax(adjacent));
    result.bound = SensitivityBound(ConstantsFor(config, lambda_max), config.days);
    result.distance = PreNoiseDistance(config, base, adjacent);
    result.ratio = result.distance / result.bound;
    return result;
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(trials, std::thread::hardware_concurrency()));
  std::vector<std::future<std::vector<AuditTrial>>> futures;
  for (std::size_t w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      std::vector<AuditTrial> out;
      for (std::size_t t = w; t < trials; t += workers) out.push_back(run_trial(t));
      return out;
    }));
  }
  AuditReport report;
  for (auto& f : futures) {
    for (AuditTrial& t : f.get()) report.trials.push_back(t);
  }
  std::sort(report.trials.begin(), report.trials.end(),
            [](const AuditTrial& a, const AuditTrial& b) { return a.trial < b.trial; });

  report.passed = true;
  const double slack_numerator = 10.0 * static_cast<double>(config.days) * config.step_tolerance;
  for (const AuditTrial& t : report.trials) {
    const double slack = slack_numerator / t.bound;
    report.max_ratio = std::max(report.max_ratio, t.ratio);
    report.max_slack = std::max(report.max_slack, slack);
    if (!(t.ratio <= 1.0 + slack)) report.passed = false;
  }
  return report;
}

std::string AuditReport::Summary() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "trials=%zu max_ratio=%.6g slack=%.3g result=%s",
                trials.size(), max_ratio, max_slack, passed ? "PASS" : "FAIL");
  return buf;
}

void WriteAuditCsv(const AuditReport& report, const std::filesystem::path& path) {
  CsvWriter csv(path, {"trial", "t", "o", "d", "distance", "bound", "ratio"});
  for (const AuditTrial& t : report.trials) {
    csv << t.trial << t.day + 1 << t.od.origin + 1 << t.od.destination + 1 << t.distance
        << t.bound << t.ratio;
    csv.EndRow();
  }
}

std::string ImpossibilityReport::Summary() const {
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "od=%d->%d full=(%s,%s) total_flow=(%s,%s) separated=%s", od.origin + 1,
                od.destination + 1, detected_base ? "true" : "false",
                detected_adjacent ? "true" : "false", detected_base_total ? "true" : "false",
                detected_adjacent_total ? "true" : "false", Separated() ? "yes" : "no");
  return buf;
}

ImpossibilityReport DemoImpossibility(const Network& network, const DemandMatrix& base_demand,
                                      OdPair od, double period) {
  const int n = network.node_count();
  if (base_demand.node_count() != n) throw InputError("demand and network differ in node count");
  if (od.origin < 0 || od.origin >= n || od.destination < 0 || od.destination >= n ||
      od.origin == od.destination) {
    throw InputError("invalid origin-destination pair");
  }
  if (!(period > 0.0)) throw InputError("period must be positive");
  for (int endpoint : {od.origin, od.destination}) {
    for (int u = 0; u < n; ++u) {
      if (base_demand(endpoint, u) != 0.0 || base_demand(u, endpoint) != 0.0) {
        throw InputError("node " + std::to_string(endpoint + 1) +
                         " carries other demand; both endpoints must be isolated");
      }
    }
  }
  DemandMatrix adjacent = base_demand;
  adjacent.Set(od.origin, od.destination, 1.0 / period);

  const BlockVector base_flow = StandardFeasibleFlow(base_demand, network);
  const BlockVector adjacent_flow = StandardFeasibleFlow(adjacent, network);
  auto total = [&network](const BlockVector& x) {
    std::vector<double> y(network.edge_count(), 0.0);
    for (std::size_t i = 0; i < x.block_count(); ++i) {
      const auto b = x.block(i);
      for (std::size_t e = 0; e < y.size(); ++e) y[e] += b[e];
    }
    return y;
  };

  ImpossibilityReport report;
  report.od = od;
  report.detected_base = DetectOdPresence(base_flow, od.destination, network);
  report.detected_adjacent = DetectOdPresence(adjacent_flow, od.destination, network);
  const std::vector<double> y_base = total(base_flow);
  const std::vector<double> y_adjacent = total(adjacent_flow);
  report.detected_base_total = DetectOdPresence(std::span<const double>(y_base), od.destination,
                                                network);
  report.detected_adjacent_total =
      DetectOdPresence(std::span<const double>(y_adjacent), od.destination, network);
  return report;
}

}  // namespace dproute
