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

#include "dproute/flow_polytope.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "dproute/csv.h"
#include "dproute/error.h"

namespace dproute {

BlockVector::BlockVector(int node_count, int edge_count)
    : n_(node_count),
      m_(edge_count),
      values_(static_cast<std::size_t>(node_count) * node_count * edge_count, 0.0) {}

double BlockVector::Norm() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return std::sqrt(sum);
}

double BlockVector::DistanceTo(const BlockVector& other) const {
  if (other.size() != size()) throw InputError("block vectors differ in size");
  double sum = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double diff = values_[i] - other.values_[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

// Grounded Laplacian A A^T of the node-edge incidence matrix. One node per
// weakly connected component is grounded (potential fixed to zero), which
// makes the remaining system positive definite.
struct FlowPolytope::Factorization {
  std::vector<int> reduced_index;  // -1 for grounded nodes
  Eigen::LLT<Eigen::MatrixXd> llt;
  int reduced_size = 0;
};

FlowPolytope::FlowPolytope(const Network& network) : network_(network) {
  const int n = network_.node_count();

  std::vector<int> component(n, -1);
  auto factor = std::make_shared<Factorization>();
  factor->reduced_index.assign(n, -1);
  int next = 0;
  for (int root = 0; root < n; ++root) {
    if (component[root] >= 0) continue;
    component[root] = root;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      auto visit = [&](int v) {
        if (component[v] < 0) {
          component[v] = root;
          factor->reduced_index[v] = next++;
          queue.push_back(v);
        }
      };
      for (int e : network_.OutEdges(u)) visit(network_.edge(e).head);
      for (int e : network_.InEdges(u)) visit(network_.edge(e).tail);
    }
  }
  factor->reduced_size = next;

  Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(next, next);
  for (const Edge& edge : network_.edges()) {
    const int a = factor->reduced_index[edge.tail];
    const int b = factor->reduced_index[edge.head];
    if (a >= 0) laplacian(a, a) += 1.0;
    if (b >= 0) laplacian(b, b) += 1.0;
    if (a >= 0 && b >= 0) {
      laplacian(a, b) -= 1.0;
      laplacian(b, a) -= 1.0;
    }
  }
  if (next > 0) {
    factor->llt.compute(laplacian);
    if (factor->llt.info() != Eigen::Success) {
      throw NumericalError("grounded Laplacian is not positive definite", 0.0);
    }
  }
  factor_ = std::move(factor);

  reachable_.assign(static_cast<std::size_t>(n) * n, 0);
  for (int origin = 0; origin < n; ++origin) {
    char* row = reachable_.data() + static_cast<std::size_t>(origin) * n;
    std::deque<int> queue{origin};
    row[origin] = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int e : network_.OutEdges(u)) {
        const int v = network_.edge(e).head;
        if (!row[v]) {
          row[v] = 1;
          queue.push_back(v);
        }
      }
    }
  }
}

bool FlowPolytope::Reachable(OdPair od) const {
  return reachable_[static_cast<std::size_t>(od.origin) * network_.node_count() +
                    od.destination] != 0;
}

double FlowPolytope::ConservationResidual(std::span<const double> flow, OdPair od) const {
  std::vector<double> inflow(network_.node_count(), 0.0);
  for (int e = 0; e < network_.edge_count(); ++e) {
    inflow[network_.edge(e).head] += flow[e];
    inflow[network_.edge(e).tail] -= flow[e];
  }
  inflow[od.origin] += 1.0;
  inflow[od.destination] -= 1.0;
  double worst = 0.0;
  for (double r : inflow) worst = std::max(worst, std::fabs(r));
  return worst;
}

bool FlowPolytope::IsFeasible(std::span<const double> flow, OdPair od, double tol) const {
  if (flow.size() != static_cast<std::size_t>(network_.edge_count())) return false;
  for (double v : flow) {
    if (v < -tol || v > 1.0 + tol) return false;
  }
  return ConservationResidual(flow, od) <= tol;
}

double FlowPolytope::PolicyViolation(const BlockVector& x) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.block_count(); ++i) {
    const OdPair od = x.PairOf(i);
    const auto block = x.block(i);
    if (od.origin == od.destination || !Reachable(od)) {
      for (double v : block) worst = std::max(worst, std::fabs(v));
      continue;
    }
    for (double v : block) worst = std::max({worst, -v, v - 1.0});
    worst = std::max(worst, ConservationResidual(block, od));
  }
  return worst;
}

void FlowPolytope::ProjectAffine(std::span<double> z, OdPair od) const {
  const int n = network_.node_count();
  std::vector<double> residual(n, 0.0);
  for (int e = 0; e < network_.edge_count(); ++e) {
    residual[network_.edge(e).head] += z[e];
    residual[network_.edge(e).tail] -= z[e];
  }
  residual[od.origin] += 1.0;
  residual[od.destination] -= 1.0;

  const Factorization& f = *factor_;
  Eigen::VectorXd rhs(f.reduced_size);
  for (int v = 0; v < n; ++v) {
    if (f.reduced_index[v] >= 0) rhs[f.reduced_index[v]] = residual[v];
  }
  const Eigen::VectorXd reduced = f.reduced_size > 0 ? f.llt.solve(rhs) : rhs;
  std::vector<double> potential(n, 0.0);
  for (int v = 0; v < n; ++v) {
    if (f.reduced_index[v] >= 0) potential[v] = reduced[f.reduced_index[v]];
  }
  for (int e = 0; e < network_.edge_count(); ++e) {
    z[e] -= potential[network_.edge(e).head] - potential[network_.edge(e).tail];
  }
}

UnitOdFlow FlowPolytope::Project(std::span<const double> v, OdPair od, double tol,
                                 ProjectionStats* stats) const {
  const int m = network_.edge_count();
  const int n = network_.node_count();
  if (od.origin < 0 || od.origin >= n || od.destination < 0 || od.destination >= n ||
      od.origin == od.destination) {
    throw InputError("projection needs an off-diagonal pair");
  }
  if (!(tol > 0.0)) throw InputError("projection tolerance must be positive");
  if (v.size() != static_cast<std::size_t>(m)) throw InputError("flow vector length != edge count");
  if (!Reachable(od)) {
    throw InputError("no path from node " + std::to_string(od.origin + 1) + " to node " +
                     std::to_string(od.destination + 1));
  }

  // Dykstra: box step carries the correction `increment`; the affine step
  // needs none because the correction would lie in the row space of A.
  std::vector<double> affine(v.begin(), v.end());
  std::vector<double> increment(m, 0.0);
  std::vector<double> boxed(m, 0.0);
  std::vector<double> previous(m, std::numeric_limits<double>::quiet_NaN());
  double residual = 0.0;
  for (int iteration = 1; iteration <= kMaxIterations; ++iteration) {
    double change = 0.0;
    for (int e = 0; e < m; ++e) {
      const double shifted = affine[e] + increment[e];
      boxed[e] = std::clamp(shifted, 0.0, 1.0);
      increment[e] = shifted - boxed[e];
      change = std::max(change, std::fabs(boxed[e] - previous[e]));
    }
    residual = ConservationResidual(boxed, od);
    if (iteration > 1 && change <= tol / 10.0 && residual <= tol) {
      if (stats) *stats = {iteration, residual};
      return {od, std::move(boxed)};
    }
    previous = boxed;
    affine = boxed;
    ProjectAffine(affine, od);
  }
  if (stats) *stats = {kMaxIterations, residual};
  throw NumericalError("flow projection did not converge for pair " +
                           std::to_string(od.origin + 1) + "->" +
                           std::to_string(od.destination + 1) + " (residual " +
                           std::to_string(residual) + ")",
                       residual);
}

BlockVector FlowPolytope::ProjectPolicy(const BlockVector& x, double tol) const {
  if (x.node_count() != network_.node_count() || x.edge_count() != network_.edge_count()) {
    throw InputError("policy shape does not match network");
  }
  BlockVector out(x.node_count(), x.edge_count());
  for (std::size_t i = 0; i < x.block_count(); ++i) {
    const OdPair od = x.PairOf(i);
    if (od.origin == od.destination || !Reachable(od)) continue;
    const UnitOdFlow projected = Project(x.block(i), od, tol);
    std::copy(projected.flow.begin(), projected.flow.end(), out.block(i).begin());
  }
  return out;
}

UnitOdFlow ProjectUnitFlow(std::span<const double> v, OdPair od, const Network& network,
                           double tol) {
  return FlowPolytope(network).Project(v, od, tol);
}

BlockVector ProjectPolicy(const BlockVector& x, const Network& network, double tol) {
  return FlowPolytope(network).ProjectPolicy(x, tol);
}

std::vector<std::vector<int>> ShortestPathsFrom(int origin, std::span<const double> edge_costs,
                                                const Network& network) {
  const int n = network.node_count();
  if (origin < 0 || origin >= n) throw InputError("origin out of range");
  if (edge_costs.size() != static_cast<std::size_t>(network.edge_count())) {
    throw InputError("edge cost vector length != edge count");
  }
  for (double c : edge_costs) {
    if (!(c >= 0.0)) throw InputError("shortest paths need nonnegative edge costs");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  std::vector<std::vector<int>> path(n);
  std::vector<char> settled(n, 0);
  dist[origin] = 0.0;

  // Dense O(n^2) Dijkstra; labels are compared by (cost, edge sequence).
  auto better = [&](double da, const std::vector<int>& pa, double db, const std::vector<int>& pb) {
    if (da != db) return da < db;
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  };
  for (int round = 0; round < n; ++round) {
    int u = -1;
    for (int v = 0; v < n; ++v) {
      if (settled[v] || dist[v] == kInf) continue;
      if (u < 0 || better(dist[v], path[v], dist[u], path[u])) u = v;
    }
    if (u < 0) break;
    settled[u] = 1;
    for (int e : network.OutEdges(u)) {
      const int w = network.edge(e).head;
      if (settled[w]) continue;
      const double candidate = dist[u] + edge_costs[e];
      std::vector<int> candidate_path = path[u];
      candidate_path.push_back(e);
      if (dist[w] == kInf || better(candidate, candidate_path, dist[w], path[w])) {
        dist[w] = candidate;
        path[w] = std::move(candidate_path);
      }
    }
  }
  path[origin].clear();
  return path;
}

UnitOdFlow ShortestPathFlow(OdPair od, std::span<const double> edge_costs,
                            const Network& network) {
  if (od.origin == od.destination) throw InputError("shortest path needs distinct endpoints");
  if (od.destination < 0 || od.destination >= network.node_count()) {
    throw InputError("destination out of range");
  }
  const auto paths = ShortestPathsFrom(od.origin, edge_costs, network);
  if (paths[od.destination].empty()) {
    throw InputError("no path from node " + std::to_string(od.origin + 1) + " to node " +
                     std::to_string(od.destination + 1));
  }
  UnitOdFlow out{od, std::vector<double>(network.edge_count(), 0.0)};
  for (int e : paths[od.destination]) out.flow[e] = 1.0;
  return out;
}

BlockVector AllOrNothingPolicy(std::span<const double> edge_costs, const Network& network) {
  const int n = network.node_count();
  BlockVector policy(n, network.edge_count());
  for (int o = 0; o < n; ++o) {
    const auto paths = ShortestPathsFrom(o, edge_costs, network);
    for (int d = 0; d < n; ++d) {
      if (o == d) continue;
      auto block = policy.block(OdPair{o, d});
      for (int e : paths[d]) block[e] = 1.0;
    }
  }
  return policy;
}

PathDistribution DecomposeFlow(const UnitOdFlow& x, const Network& network) {
  constexpr double kSupport = 1e-12;
  constexpr double kDone = 1e-9;
  const int n = network.node_count();
  const int m = network.edge_count();
  if (x.flow.size() != static_cast<std::size_t>(m)) throw InputError("flow length != edge count");

  PathDistribution out{x.od, {}, x.flow, 0.0};
  std::vector<double>& remaining = out.circulation;
  double extracted = 0.0;
  while (extracted < 1.0 - kDone) {
    // Fewest-hop path through the support, scanning edges in id order.
    std::vector<int> via(n, -1);
    std::vector<char> seen(n, 0);
    std::deque<int> queue{x.od.origin};
    seen[x.od.origin] = 1;
    while (!queue.empty() && !seen[x.od.destination]) {
      const int u = queue.front();
      queue.pop_front();
      for (int e : network.OutEdges(u)) {
        const int v = network.edge(e).head;
        if (seen[v] || remaining[e] <= kSupport) continue;
        seen[v] = 1;
        via[v] = e;
        queue.push_back(v);
      }
    }
    if (!seen[x.od.destination]) break;
    std::vector<int> path;
    for (int v = x.od.destination; v != x.od.origin; v = network.edge(via[v]).tail) {
      path.push_back(via[v]);
    }
    std::reverse(path.begin(), path.end());
    double bottleneck = 1.0 - extracted;
    for (int e : path) bottleneck = std::min(bottleneck, remaining[e]);
    for (int e : path) remaining[e] -= bottleneck;
    extracted += bottleneck;
    out.paths.push_back({std::move(path), bottleneck});
  }
  for (double& r : remaining) {
    if (std::fabs(r) <= kSupport) r = 0.0;
    out.circulation_mass += std::fabs(r);
  }
  return out;
}

std::vector<int> PathNodes(std::span<const int> edges, int origin, const Network& network) {
  std::vector<int> nodes{origin};
  for (int e : edges) {
    if (network.edge(e).tail != nodes.back()) throw InputError("edge sequence is not a path");
    nodes.push_back(network.edge(e).head);
  }
  return nodes;
}

void WritePolicyCsv(const BlockVector& policy, const Network& network,
                    const std::filesystem::path& path) {
  CsvWriter csv(path, {"origin", "destination", "edge_tail", "edge_head", "value"});
  for (std::size_t i = 0; i < policy.block_count(); ++i) {
    const OdPair od = policy.PairOf(i);
    const auto block = policy.block(i);
    for (int e = 0; e < network.edge_count(); ++e) {
      if (block[e] == 0.0) continue;
      csv << od.origin + 1 << od.destination + 1 << network.edge(e).tail + 1
          << network.edge(e).head + 1 << block[e];
      csv.EndRow();
    }
  }
}

BlockVector ReadPolicyCsv(const std::filesystem::path& path, const Network& network) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  BlockVector policy(network.node_count(), network.edge_count());
  std::string line;
  std::size_t line_no = 1;
  std::getline(in, line);
  if (line != "origin,destination,edge_tail,edge_head,value") {
    throw ParseError(1, "unexpected policy header");
  }
  const int n = network.node_count();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field[5];
    for (auto& f : field) {
      if (!std::getline(row, f, ',')) throw ParseError(line_no, "expected 5 columns");
    }
    try {
      const int o = std::stoi(field[0]) - 1;
      const int d = std::stoi(field[1]) - 1;
      const int tail = std::stoi(field[2]) - 1;
      const int head = std::stoi(field[3]) - 1;
      if (o < 0 || o >= n || d < 0 || d >= n) throw ParseError(line_no, "pair out of range");
      const auto e = network.EdgeIndex(tail, head);
      if (!e) throw ParseError(line_no, "edge not in network");
      policy.block(OdPair{o, d})[*e] = std::stod(field[4]);
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "malformed policy row");
    }
  }
  return policy;
}

void WritePathDistributionsCsv(std::span<const PathDistribution> distributions,
                               const Network& network, const std::filesystem::path& path) {
  CsvWriter csv(path, {"origin", "destination", "path", "weight"});
  for (const PathDistribution& dist : distributions) {
    for (const WeightedPath& p : dist.paths) {
      std::string nodes;
      for (int v : PathNodes(p.edges, dist.od.origin, network)) {
        if (!nodes.empty()) nodes += '-';
        nodes += std::to_string(v + 1);
      }
      csv << dist.od.origin + 1 << dist.od.destination + 1 << nodes << p.weight;
      csv.EndRow();
    }
  }
}

}  // namespace dproute
