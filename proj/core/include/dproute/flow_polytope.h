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

#ifndef DPROUTE_FLOW_POLYTOPE_H_
#define DPROUTE_FLOW_POLYTOPE_H_

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "dproute/network.h"

namespace dproute {

// Vector made of one length-m block per ordered node pair, blocks in
// row-major pair order (o * n + d). A unit network flow (routing policy)
// and the objective's gradient share this layout.
class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(int node_count, int edge_count);

  int node_count() const { return n_; }
  int edge_count() const { return m_; }
  std::size_t block_count() const { return static_cast<std::size_t>(n_) * n_; }
  std::size_t size() const { return values_.size(); }

  std::size_t BlockIndex(OdPair od) const {
    return static_cast<std::size_t>(od.origin) * n_ + od.destination;
  }
  OdPair PairOf(std::size_t block) const {
    return {static_cast<int>(block / n_), static_cast<int>(block % n_)};
  }
  std::span<double> block(std::size_t i) { return {values_.data() + i * m_, static_cast<std::size_t>(m_)}; }
  std::span<const double> block(std::size_t i) const {
    return {values_.data() + i * m_, static_cast<std::size_t>(m_)};
  }
  std::span<double> block(OdPair od) { return block(BlockIndex(od)); }
  std::span<const double> block(OdPair od) const { return block(BlockIndex(od)); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double Norm() const;
  double DistanceTo(const BlockVector& other) const;

  friend bool operator==(const BlockVector&, const BlockVector&) = default;

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<double> values_;
};

using RoutingPolicy = BlockVector;

// Flow over the edges that routes one unit from od.origin to od.destination.
struct UnitOdFlow {
  OdPair od;
  std::vector<double> flow;
};

struct ProjectionStats {
  int iterations = 0;
  double residual = 0.0;
};

// Feasible set of unit (o,d) flows: conservation with net inflow -1 at o and
// +1 at d, plus the box 0 <= x_e <= 1. A unit network flow is the product of
// these sets over all off-diagonal pairs; diagonal blocks are zero.
//
// Projection runs Dykstra's alternating projections between the box and the
// conservation subspace. The subspace projection reuses one Cholesky
// factorization of the grounded graph Laplacian, shared by all pairs.
class FlowPolytope {
 public:
  static constexpr int kMaxIterations = 10000;

  explicit FlowPolytope(const Network& network);

  const Network& network() const { return network_; }
  bool Reachable(OdPair od) const;

  // Euclidean projection of v onto the unit (o,d) flow set. Stops once the
  // conservation residual is <= tol and successive iterates move <= tol / 10.
  // Throws InputError when od.destination is unreachable and NumericalError
  // after kMaxIterations.
  UnitOdFlow Project(std::span<const double> v, OdPair od, double tol = 1e-8,
                     ProjectionStats* stats = nullptr) const;

  // Blockwise projection of a full policy-shaped vector. Diagonal blocks and
  // blocks of pairs with no path are set to zero.
  BlockVector ProjectPolicy(const BlockVector& x, double tol = 1e-8) const;

  // Infinity norm of (net inflow) - (-1 at o, +1 at d).
  double ConservationResidual(std::span<const double> flow, OdPair od) const;
  // Conservation residual within tol and box satisfied within tol.
  bool IsFeasible(std::span<const double> flow, OdPair od, double tol) const;
  // Max violation over all blocks (diagonal and unreachable blocks must be
  // zero).
  double PolicyViolation(const BlockVector& x) const;

 private:
  struct Factorization;

  void ProjectAffine(std::span<double> z, OdPair od) const;

  Network network_;
  std::shared_ptr<const Factorization> factor_;
  std::vector<char> reachable_;  // n x n, row-major
};

UnitOdFlow ProjectUnitFlow(std::span<const double> v, OdPair od, const Network& network,
                           double tol = 1e-8);
BlockVector ProjectPolicy(const BlockVector& x, const Network& network, double tol = 1e-8);

// Minimum-cost simple paths from `origin` to every node under nonnegative
// edge costs. Entry d holds the edge ids of the path (empty for the origin
// and unreachable nodes). Equal-cost paths are broken by the
// lexicographically smallest edge-id sequence.
std::vector<std::vector<int>> ShortestPathsFrom(int origin, std::span<const double> edge_costs,
                                                const Network& network);

// 0/1 indicator of the minimum-cost o->d path. Throws InputError when d is
// unreachable or a cost is negative.
UnitOdFlow ShortestPathFlow(OdPair od, std::span<const double> edge_costs, const Network& network);

// Every off-diagonal block set to its shortest path under `edge_costs`;
// blocks of unreachable pairs stay zero.
BlockVector AllOrNothingPolicy(std::span<const double> edge_costs, const Network& network);

struct WeightedPath {
  std::vector<int> edges;
  double weight = 0.0;
};

struct PathDistribution {
  OdPair od;
  std::vector<WeightedPath> paths;
  // Flow left after peeling off paths; a circulation up to rounding.
  std::vector<double> circulation;
  double circulation_mass = 0.0;
};

// Peel-off decomposition: repeatedly take a fewest-hop o->d path through
// edges carrying more than 1e-12, subtract its bottleneck, and stop once the
// extracted weight reaches 1 (within 1e-9).
PathDistribution DecomposeFlow(const UnitOdFlow& x, const Network& network);

// Node sequence (0-based) of an edge path starting at `origin`.
std::vector<int> PathNodes(std::span<const int> edges, int origin, const Network& network);

// CSV with columns origin, destination, edge_tail, edge_head, value (1-based
// ids, zero entries omitted).
void WritePolicyCsv(const BlockVector& policy, const Network& network,
                    const std::filesystem::path& path);
BlockVector ReadPolicyCsv(const std::filesystem::path& path, const Network& network);

// CSV with columns origin, destination, path, weight; the path is the
// 1-based node sequence joined by '-'.
void WritePathDistributionsCsv(std::span<const PathDistribution> distributions,
                               const Network& network, const std::filesystem::path& path);

}  // namespace dproute

#endif  // DPROUTE_FLOW_POLYTOPE_H_
