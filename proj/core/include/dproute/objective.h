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

#ifndef DPROUTE_OBJECTIVE_H_
#define DPROUTE_OBJECTIVE_H_

#include <string>
#include <string_view>
#include <vector>

#include "dproute/demand.h"
#include "dproute/flow_polytope.h"
#include "dproute/network.h"

namespace dproute {

// Which smoothness / cross-derivative constants drive step sizes and noise.
//   kPaperFormula: closed-form bounds valid for every demand below lambda_max.
//   kExperimentalEigenvalue: beta = top eigenvalue of B^T Q B at the mean
//     demand and C = beta, the choice used for the Sioux Falls experiments.
enum class ConstantsConvention { kPaperFormula, kExperimentalEigenvalue };

std::string_view ConventionName(ConstantsConvention convention);
ConstantsConvention ParseConvention(std::string_view name);

struct ModelConstants {
  double lambda_max = 0.0;  // requests/minute
  double alpha = 0.0;       // strong convexity (regularizer weight)
  double beta = 0.0;        // smoothness
  double C = 0.0;           // bound on d(grad F)/d Lambda(o,d)
  double K = 0.0;           // bound on ||grad F|| over the feasible set
  double T = 0.0;           // operation period, minutes
  ConstantsConvention convention = ConstantsConvention::kPaperFormula;
};

// y = sum_{(o,d)} Lambda(o,d) x^{(o,d)}, i.e. B_Lambda x without forming B.
std::vector<double> TotalEdgeFlow(const BlockVector& x, const DemandMatrix& demand);

// y^T (Q y + c).
double TravelTimeCost(const BlockVector& x, const DemandMatrix& demand,
                      const LatencyModel& latency);

// Travel time plus (alpha / 2) ||x||^2. alpha = 0 is allowed for evaluation.
double RegularizedCost(const BlockVector& x, const DemandMatrix& demand,
                       const LatencyModel& latency, double alpha);

// Block (o,d) is Lambda(o,d) (2 Q y + c) + alpha x^{(o,d)}.
BlockVector Gradient(const BlockVector& x, const DemandMatrix& demand,
                     const LatencyModel& latency, double alpha);
void GradientInto(const BlockVector& x, const DemandMatrix& demand, const LatencyModel& latency,
                  double alpha, BlockVector& out);

// Largest eigenvalue of B^T Q B. B = vec(Lambda) kron I_m has orthogonal
// structure, so it equals ||vec(Lambda)||^2 max_e q_e.
double KroneckerTopEigenvalue(const DemandMatrix& demand, const LatencyModel& latency);

// Closed-form constants for the affine model:
//   beta = 2 n^2 lambda_max^2 max_e q_e + alpha     (bound on the Hessian)
//   C    = 2 lambda_max max_e q_e sqrt(m) n (n + 1) + ||c||
//   K    = 2 n^2 lambda_max max_e q_e (n^2 sqrt(m) lambda_max)
//          + alpha n sqrt(m) + n lambda_max ||c||
ModelConstants ComputeConstants(const Network& network, const LatencyModel& latency,
                                double lambda_max, double alpha, double period_minutes);

// beta = KroneckerTopEigenvalue(mean_demand), C = beta; K as above. Throws
// InputError when beta < alpha.
ModelConstants ExperimentalConstants(const Network& network, const LatencyModel& latency,
                                     const DemandMatrix& mean_demand, double lambda_max,
                                     double alpha, double period_minutes);

// (1/N) sum_k RegularizedCost(x, Lambda_k).
double EmpiricalCost(const BlockVector& x, const DemandDataset& dataset,
                     const LatencyModel& latency, double alpha);

}  // namespace dproute

#endif  // DPROUTE_OBJECTIVE_H_
