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

#include <random>
#include <string>

#include "benchmark/benchmark.h"
#include "dproute/baseline.h"
#include "dproute/demand.h"
#include "dproute/dp_sgd.h"
#include "dproute/flow_polytope.h"
#include "dproute/network.h"
#include "dproute/objective.h"

namespace dproute {
namespace {

struct SiouxFalls {
  SiouxFalls()
      : network(ReadTntpNetworkFile(std::string(DPROUTE_BENCH_DATA_DIR) + "/SiouxFalls_net.tntp")
                    .WithCapacityDivisor(60.0)),
        latency(AffineLatencyFrom(network, 2.0)),
        demand(ReadTntpTripsFile(std::string(DPROUTE_BENCH_DATA_DIR) + "/SiouxFalls_trips.tntp",
                                 network.node_count())),
        polytope(network),
        x(FreeFlowPolicy(network)) {}

  Network network;
  LatencyModel latency;
  DemandMatrix demand;
  FlowPolytope polytope;
  BlockVector x;
};

const SiouxFalls& Instance() {
  static const SiouxFalls instance;
  return instance;
}

BlockVector Perturbed(const BlockVector& x, double scale) {
  BlockVector out = x;
  std::mt19937_64 gen(1);
  std::normal_distribution<double> noise(0.0, scale);
  for (double& v : out.values()) v += noise(gen);
  return out;
}

void BM_ProjectUnitFlow(benchmark::State& state) {
  const SiouxFalls& sf = Instance();
  const BlockVector noisy = Perturbed(sf.x, 0.1);
  const OdPair od{0, 19};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sf.polytope.Project(noisy.block(od), od, 1e-6));
  }
}
BENCHMARK(BM_ProjectUnitFlow);

void BM_ProjectPolicy(benchmark::State& state) {
  const SiouxFalls& sf = Instance();
  const BlockVector noisy = Perturbed(sf.x, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(sf.polytope.ProjectPolicy(noisy, 1e-6));
}
BENCHMARK(BM_ProjectPolicy)->Unit(benchmark::kMillisecond);

void BM_Gradient(benchmark::State& state) {
  const SiouxFalls& sf = Instance();
  BlockVector out(sf.x.node_count(), sf.x.edge_count());
  for (auto _ : state) {
    GradientInto(sf.x, sf.demand, sf.latency, 1.0, out);
    benchmark::DoNotOptimize(out.values().data());
  }
}
BENCHMARK(BM_Gradient)->Unit(benchmark::kMicrosecond);

void BM_ShortestPathsFrom(benchmark::State& state) {
  const SiouxFalls& sf = Instance();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ShortestPathsFrom(0, sf.network.free_flow_time(), sf.network));
  }
}
BENCHMARK(BM_ShortestPathsFrom);

void BM_FrankWolfeIterations(benchmark::State& state) {
  const SiouxFalls& sf = Instance();
  for (auto _ : state) {
    benchmark::DoNotOptimize(FrankWolfeSolve(sf.demand, sf.network, sf.latency, 0.0, 1e-300,
                                             static_cast<std::size_t>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FrankWolfeIterations)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dproute

BENCHMARK_MAIN();
