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

#include "dproute/objective.h"

#include <cmath>

#include "dproute/error.h"

namespace dproute {
namespace {

void CheckShapes(const BlockVector& x, const DemandMatrix& demand) {
  if (x.node_count() != demand.node_count()) {
    throw InputError("policy and demand differ in node count");
  }
}

double SquaredNorm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return sum;
}

}  // namespace

std::string_view ConventionName(ConstantsConvention convention) {
  switch (convention) {
    case ConstantsConvention::kPaperFormula:
      return "paper-formula";
    case ConstantsConvention::kExperimentalEigenvalue:
      return "experimental-eigenvalue";
  }
  return "unknown";
}

ConstantsConvention ParseConvention(std::string_view name) {
  if (name == "paper-formula") return ConstantsConvention::kPaperFormula;
  if (name == "experimental-eigenvalue") return ConstantsConvention::kExperimentalEigenvalue;
  throw InputError("unknown constants convention '" + std::string(name) + "'");
}

std::vector<double> TotalEdgeFlow(const BlockVector& x, const DemandMatrix& demand) {
  CheckShapes(x, demand);
  const auto rates = demand.rates();
  std::vector<double> y(x.edge_count(), 0.0);
  for (std::size_t i = 0; i < x.block_count(); ++i) {
    const double rate = rates[i];
    if (rate == 0.0) continue;
    const auto block = x.block(i);
    for (int e = 0; e < x.edge_count(); ++e) y[e] += rate * block[e];
  }
  return y;
}

double TravelTimeCost(const BlockVector& x, const DemandMatrix& demand,
                      const LatencyModel& latency) {
  if (latency.edge_count() != x.edge_count()) throw InputError("latency/policy edge mismatch");
  const std::vector<double> y = TotalEdgeFlow(x, demand);
  const auto q = latency.slope();
  const auto c = latency.free_flow_time();
  double cost = 0.0;
  for (int e = 0; e < x.edge_count(); ++e) cost += y[e] * (q[e] * y[e] + c[e]);
  return cost;
}

double RegularizedCost(const BlockVector& x, const DemandMatrix& demand,
                       const LatencyModel& latency, double alpha) {
  if (!(alpha >= 0.0)) throw InputError("regularizer weight must be nonnegative");
  return TravelTimeCost(x, demand, latency) + 0.5 * alpha * SquaredNorm(x.values());
}

void GradientInto(const BlockVector& x, const DemandMatrix& demand, const LatencyModel& latency,
                  double alpha, BlockVector& out) {
  if (latency.edge_count() != x.edge_count()) throw InputError("latency/policy edge mismatch");
  if (out.size() != x.size()) out = BlockVector(x.node_count(), x.edge_count());
  const std::vector<double> y = TotalEdgeFlow(x, demand);
  const auto q = latency.slope();
  const auto c = latency.free_flow_time();
  const int m = x.edge_count();
  std::vector<double> marginal(m);
  for (int e = 0; e < m; ++e) marginal[e] = 2.0 * q[e] * y[e] + c[e];
  const auto rates = demand.rates();
  for (std::size_t i = 0; i < x.block_count(); ++i) {
    const auto in = x.block(i);
    auto g = out.block(i);
    for (int e = 0; e < m; ++e) g[e] = rates[i] * marginal[e] + alpha * in[e];
  }
}

BlockVector Gradient(const BlockVector& x, const DemandMatrix& demand,
                     const LatencyModel& latency, double alpha) {
  BlockVector out(x.node_count(), x.edge_count());
  GradientInto(x, demand, latency, alpha, out);
  return out;
}

double KroneckerTopEigenvalue(const DemandMatrix& demand, const LatencyModel& latency) {
  return demand.SquaredNorm() * latency.slope_norm();
}

namespace {

double GradientBound(double n, double m, double lambda_max, double q_max, double c_norm,
                     double alpha) {
  return 2.0 * n * n * lambda_max * q_max * (n * n * std::sqrt(m) * lambda_max) +
         alpha * n * std::sqrt(m) + n * lambda_max * c_norm;
}

void CheckConstantInputs(double lambda_max, double alpha, double period_minutes) {
  if (!(lambda_max >= 0.0)) throw InputError("lambda_max must be nonnegative");
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  if (!(period_minutes > 0.0)) throw InputError("operation period T must be positive");
}

}  // namespace

ModelConstants ComputeConstants(const Network& network, const LatencyModel& latency,
                                double lambda_max, double alpha, double period_minutes) {
  CheckConstantInputs(lambda_max, alpha, period_minutes);
  const double n = network.node_count();
  const double m = network.edge_count();
  const double q_max = latency.slope_norm();
  const double c_norm = std::sqrt(SquaredNorm(latency.free_flow_time()));
  ModelConstants k;
  k.lambda_max = lambda_max;
  k.alpha = alpha;
  k.beta = 2.0 * n * n * lambda_max * lambda_max * q_max + alpha;
  k.C = 2.0 * lambda_max * q_max * std::sqrt(m) * n * (n + 1.0) + c_norm;
  k.K = GradientBound(n, m, lambda_max, q_max, c_norm, alpha);
  k.T = period_minutes;
  k.convention = ConstantsConvention::kPaperFormula;
  return k;
}

ModelConstants ExperimentalConstants(const Network& network, const LatencyModel& latency,
                                     const DemandMatrix& mean_demand, double lambda_max,
                                     double alpha, double period_minutes) {
  CheckConstantInputs(lambda_max, alpha, period_minutes);
  ModelConstants k = ComputeConstants(network, latency, lambda_max, alpha, period_minutes);
  k.beta = KroneckerTopEigenvalue(mean_demand, latency);
  if (k.beta < alpha) {
    throw InputError("experimental beta (" + std::to_string(k.beta) +
                     ") is below alpha; smoothness must dominate strong convexity");
  }
  k.C = k.beta;
  k.convention = ConstantsConvention::kExperimentalEigenvalue;
  return k;
}

double EmpiricalCost(const BlockVector& x, const DemandDataset& dataset,
                     const LatencyModel& latency, double alpha) {
  double sum = 0.0;
  for (const DemandMatrix& day : dataset.days()) sum += RegularizedCost(x, day, latency, alpha);
  return sum / static_cast<double>(dataset.size());
}

}  // namespace dproute
