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

#ifndef DPROUTE_BASELINE_H_
#define DPROUTE_BASELINE_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "dproute/demand.h"
#include "dproute/flow_polytope.h"
#include "dproute/network.h"

namespace dproute {

struct FrankWolfeStep {
  std::size_t iteration = 0;
  double gap = 0.0;
  double cost = 0.0;  // objective at the iterate the gap was measured on
};

struct FrankWolfeResult {
  BlockVector policy;
  std::vector<FrankWolfeStep> trace;
  double gap = 0.0;
  bool converged = false;
};

// Frank-Wolfe on F(x) = y^T (Q y + c) + (alpha / 2) ||x||^2 over unit network
// flows. The linear subproblem is a shortest path per pair: under the shared
// marginal costs 2 Q y + c when alpha = 0, under the block's own gradient
// otherwise. Steps use exact line search on the quadratic, falling back to
// 2 / (j + 2) when the curvature along the direction vanishes. Stops when
// the duality gap g^T (x - s) <= gap_tol; on hitting max_iters the result has
// converged = false and still reports the gap. Throws InputError when some
// pair is disconnected.
FrankWolfeResult FrankWolfeSolve(const DemandMatrix& demand, const Network& network,
                                 const LatencyModel& latency, double alpha, double gap_tol,
                                 std::size_t max_iters = 5000,
                                 std::optional<BlockVector> x0 = std::nullopt);

// Accelerated projected gradient (FISTA with function-value restarts, step
// 1 / (2 ||vec(Lambda)||^2 max q + alpha)) on the same objective. The
// stopping rule and the trace use the Frank-Wolfe gap, so results carry the
// same certificate as FrankWolfeSolve. Converges linearly when alpha > 0,
// where Frank-Wolfe stalls.
FrankWolfeResult ProjectedGradientSolve(const DemandMatrix& demand, const FlowPolytope& polytope,
                                        const LatencyModel& latency, double alpha,
                                        double gap_tol, std::size_t max_iters = 5000,
                                        std::optional<BlockVector> x0 = std::nullopt,
                                        double projection_tol = 1e-10);

// max over vertices s of g(x)^T (x - s): the Frank-Wolfe gap at x.
double FrankWolfeGap(const BlockVector& x, const DemandMatrix& demand, const Network& network,
                     const LatencyModel& latency, double alpha);

// Gap trace CSV: iteration, gap, cost.
void WriteGapTraceCsv(std::span<const FrankWolfeStep> trace, const std::filesystem::path& path);

// Feasible solution of the standard formulation, where demand sits in the
// constraints: block (o,d) carries Lambda(o,d) along the free-flow shortest
// path, so its net inflow is Lambda(o,d) (1[u = d] - 1[u = o]).
BlockVector StandardFeasibleFlow(const DemandMatrix& demand, const Network& network);

// Net inflow of a per-edge flow at `node`.
double NetInflow(std::span<const double> edge_flow, int node, const Network& network);

// True iff some block of a standard-formulation solution has net inflow of
// magnitude > 1e-12 at `node`, i.e. the node is a source or sink of a trip.
bool DetectOdPresence(const BlockVector& solution, int node, const Network& network);
// Same test on released total edge flows y only.
bool DetectOdPresence(std::span<const double> total_flow, int node, const Network& network);

}  // namespace dproute

#endif  // DPROUTE_BASELINE_H_
