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

#include "dproute/baseline.h"

#include <algorithm>
#include <cmath>

#include "dproute/csv.h"
#include "dproute/dp_sgd.h"
#include "dproute/error.h"
#include "dproute/objective.h"

namespace dproute {
namespace {

constexpr double kPresenceThreshold = 1e-12;

// Linear minimization over unit network flows for gradient g. Fills `vertex`
// and returns g^T vertex.
double LinearMinimizer(const BlockVector& gradient, const std::vector<double>& marginal,
                       double alpha, const Network& network, BlockVector& vertex) {
  const int n = network.node_count();
  std::fill(vertex.values().begin(), vertex.values().end(), 0.0);
  double value = 0.0;
  for (int o = 0; o < n; ++o) {
    std::vector<std::vector<int>> shared;
    if (alpha == 0.0) shared = ShortestPathsFrom(o, marginal, network);
    for (int d = 0; d < n; ++d) {
      if (o == d) continue;
      const OdPair od{o, d};
      const auto g = gradient.block(od);
      std::vector<int> path;
      if (alpha == 0.0) {
        path = std::move(shared[d]);
      } else {
        path = ShortestPathsFrom(o, g, network)[d];
      }
      auto s = vertex.block(od);
      for (int e : path) {
        s[e] = 1.0;
        value += g[e];
      }
    }
  }
  return value;
}

// Pairs without a path have the empty flow set pinned at zero, so they
// must not carry demand.
void RequireRoutable(const DemandMatrix& demand, const FlowPolytope& polytope) {
  const int n = demand.node_count();
  for (int o = 0; o < n; ++o) {
    for (int d = 0; d < n; ++d) {
      if (o != d && demand(o, d) > 0.0 && !polytope.Reachable({o, d})) {
        throw InputError("demanded pair " + std::to_string(o + 1) + "->" +
                         std::to_string(d + 1) + " is disconnected");
      }
    }
  }
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

std::vector<double> MarginalCosts(const std::vector<double>& y, const LatencyModel& latency) {
  std::vector<double> w(y.size());
  for (std::size_t e = 0; e < y.size(); ++e) {
    w[e] = 2.0 * latency.slope()[e] * y[e] + latency.free_flow_time()[e];
  }
  return w;
}

}  // namespace

FrankWolfeResult FrankWolfeSolve(const DemandMatrix& demand, const Network& network,
                                 const LatencyModel& latency, double alpha, double gap_tol,
                                 std::size_t max_iters, std::optional<BlockVector> x0) {
  if (!(alpha >= 0.0)) throw InputError("alpha must be nonnegative");
  if (!(gap_tol > 0.0)) throw InputError("gap tolerance must be positive");
  if (demand.node_count() != network.node_count()) {
    throw InputError("demand and network differ in node count");
  }
  RequireRoutable(demand, FlowPolytope(network));
  FrankWolfeResult result;
  result.policy = x0 ? *std::move(x0) : FreeFlowPolicy(network);
  BlockVector& x = result.policy;
  BlockVector gradient(x.node_count(), x.edge_count());
  BlockVector vertex(x.node_count(), x.edge_count());
  BlockVector direction(x.node_count(), x.edge_count());
  const auto q = latency.slope();

  for (std::size_t j = 0;; ++j) {
    const std::vector<double> y = TotalEdgeFlow(x, demand);
    const std::vector<double> marginal = MarginalCosts(y, latency);
    GradientInto(x, demand, latency, alpha, gradient);
    const double linear_value = LinearMinimizer(gradient, marginal, alpha, network, vertex);
    const double gap = Dot(gradient.values(), x.values()) - linear_value;
    result.gap = gap;
    result.trace.push_back({j, gap, RegularizedCost(x, demand, latency, alpha)});
    if (gap <= gap_tol) {
      result.converged = true;
      break;
    }
    if (j >= max_iters) break;

    const auto xs = x.values();
    const auto ss = vertex.values();
    auto ds = direction.values();
    for (std::size_t i = 0; i < ds.size(); ++i) ds[i] = ss[i] - xs[i];
    const std::vector<double> dy = TotalEdgeFlow(direction, demand);
    double curvature = alpha * Dot(ds, ds);
    for (std::size_t e = 0; e < dy.size(); ++e) curvature += 2.0 * q[e] * dy[e] * dy[e];
    double step = 2.0 / (static_cast<double>(j) + 2.0);
    if (curvature > 0.0) step = std::clamp(gap / curvature, 0.0, 1.0);
    auto xm = x.values();
    for (std::size_t i = 0; i < xm.size(); ++i) xm[i] += step * ds[i];
  }
  return result;
}

FrankWolfeResult ProjectedGradientSolve(const DemandMatrix& demand, const FlowPolytope& polytope,
                                        const LatencyModel& latency, double alpha,
                                        double gap_tol, std::size_t max_iters,
                                        std::optional<BlockVector> x0, double projection_tol) {
  if (!(alpha >= 0.0)) throw InputError("alpha must be nonnegative");
  if (!(gap_tol > 0.0)) throw InputError("gap tolerance must be positive");
  const Network& network = polytope.network();
  if (demand.node_count() != network.node_count()) {
    throw InputError("demand and network differ in node count");
  }
  RequireRoutable(demand, polytope);
  const double lipschitz = 2.0 * KroneckerTopEigenvalue(demand, latency) + alpha;
  FrankWolfeResult result;
  result.policy = x0 ? *std::move(x0) : FreeFlowPolicy(network);
  if (lipschitz == 0.0) {
    result.trace.push_back({0, 0.0, 0.0});
    result.converged = true;
    return result;
  }
  BlockVector& x = result.policy;
  BlockVector z = x;
  BlockVector gradient(x.node_count(), x.edge_count());
  double cost = RegularizedCost(x, demand, latency, alpha);
  double momentum = 1.0;

  for (std::size_t j = 0;; ++j) {
    const double gap = FrankWolfeGap(x, demand, network, latency, alpha);
    result.gap = gap;
    result.trace.push_back({j, gap, cost});
    if (gap <= gap_tol) {
      result.converged = true;
      break;
    }
    if (j >= max_iters) break;

    GradientInto(z, demand, latency, alpha, gradient);
    auto zs = z.values();
    const auto gs = gradient.values();
    for (std::size_t i = 0; i < zs.size(); ++i) zs[i] -= gs[i] / lipschitz;
    BlockVector next = polytope.ProjectPolicy(z, projection_tol);
    const double next_cost = RegularizedCost(next, demand, latency, alpha);
    if (next_cost > cost) {
      // Restart: plain projected gradient step from x.
      momentum = 1.0;
      GradientInto(x, demand, latency, alpha, gradient);
      z = x;
      auto zr = z.values();
      for (std::size_t i = 0; i < zr.size(); ++i) zr[i] -= gs[i] / lipschitz;
      next = polytope.ProjectPolicy(z, projection_tol);
      z = next;
      cost = RegularizedCost(next, demand, latency, alpha);
      x = std::move(next);
      continue;
    }
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const double beta = (momentum - 1.0) / next_momentum;
    auto zn = z.values();
    const auto xs = x.values();
    const auto ns = next.values();
    for (std::size_t i = 0; i < zn.size(); ++i) zn[i] = ns[i] + beta * (ns[i] - xs[i]);
    momentum = next_momentum;
    cost = next_cost;
    x = std::move(next);
  }
  return result;
}

double FrankWolfeGap(const BlockVector& x, const DemandMatrix& demand, const Network& network,
                     const LatencyModel& latency, double alpha) {
  const BlockVector gradient = Gradient(x, demand, latency, alpha);
  BlockVector vertex(x.node_count(), x.edge_count());
  const std::vector<double> marginal = MarginalCosts(TotalEdgeFlow(x, demand), latency);
  const double linear_value = LinearMinimizer(gradient, marginal, alpha, network, vertex);
  return Dot(gradient.values(), x.values()) - linear_value;
}

void WriteGapTraceCsv(std::span<const FrankWolfeStep> trace, const std::filesystem::path& path) {
  CsvWriter csv(path, {"iteration", "gap", "cost"});
  for (const FrankWolfeStep& step : trace) {
    csv << step.iteration << step.gap << step.cost;
    csv.EndRow();
  }
}

BlockVector StandardFeasibleFlow(const DemandMatrix& demand, const Network& network) {
  const int n = network.node_count();
  if (demand.node_count() != n) throw InputError("demand and network differ in node count");
  BlockVector solution(n, network.edge_count());
  for (int o = 0; o < n; ++o) {
    const auto paths = ShortestPathsFrom(o, network.free_flow_time(), network);
    for (int d = 0; d < n; ++d) {
      const double rate = demand(o, d);
      if (o == d || rate == 0.0) continue;
      if (paths[d].empty()) {
        throw InputError("demanded pair " + std::to_string(o + 1) + "->" +
                         std::to_string(d + 1) + " is disconnected");
      }
      auto block = solution.block(OdPair{o, d});
      for (int e : paths[d]) block[e] = rate;
    }
  }
  return solution;
}

double NetInflow(std::span<const double> edge_flow, int node, const Network& network) {
  double inflow = 0.0;
  for (int e : network.InEdges(node)) inflow += edge_flow[e];
  for (int e : network.OutEdges(node)) inflow -= edge_flow[e];
  return inflow;
}

bool DetectOdPresence(const BlockVector& solution, int node, const Network& network) {
  for (std::size_t i = 0; i < solution.block_count(); ++i) {
    if (std::fabs(NetInflow(solution.block(i), node, network)) > kPresenceThreshold) return true;
  }
  return false;
}

bool DetectOdPresence(std::span<const double> total_flow, int node, const Network& network) {
  return std::fabs(NetInflow(total_flow, node, network)) > kPresenceThreshold;
}

}  // namespace dproute
