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

#ifndef DPROUTE_DP_SGD_H_
#define DPROUTE_DP_SGD_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dproute/demand.h"
#include "dproute/flow_polytope.h"
#include "dproute/objective.h"

namespace dproute {

struct PrivacyParams {
  double epsilon = 0.1;
  double delta = 0.1;

  // Throws InputError unless epsilon > 0 and 0 < delta < 1.
  void Validate() const;
};

// eta_{k-1} = min(1 / (alpha k), min(1, 2 alpha) / beta), k >= 1.
double StepSize(std::size_t k, double alpha, double beta);

// l2 sensitivity of the final iterate under request-level adjacency:
// s = (C / T) min(min(1, 2 alpha) / beta, 1 / (alpha N)).
double Sensitivity(const ModelConstants& constants, std::size_t days);

// Gaussian mechanism: sigma = (s / epsilon) sqrt(2 ln(1.25 / delta)).
double GaussianNoiseScale(const ModelConstants& constants, std::size_t days,
                          const PrivacyParams& privacy);

// `dim` i.i.d. N(0, sigma^2) draws from the noise substream of `seed`.
std::vector<double> SampleGaussian(double sigma, std::size_t dim, std::uint64_t seed);

// Reads each day of a dataset exactly once, in order.
class DayStream {
 public:
  explicit DayStream(const DemandDataset& dataset);

  std::size_t size() const { return dataset_.size(); }
  double period() const { return dataset_.period(); }
  bool Done() const { return next_ == dataset_.size(); }
  // Throws std::logic_error once exhausted.
  const DemandMatrix& Next();
  // Number of times each day has been handed out.
  std::span<const int> reads() const { return reads_; }

 private:
  const DemandDataset& dataset_;
  std::size_t next_ = 0;
  std::vector<int> reads_;
};

struct SgdOptions {
  double step_tolerance = 1e-6;
  double final_tolerance = 1e-8;
  // Replaces the calibrated noise scale, e.g. 0 to run the noiseless part.
  std::optional<double> sigma_override;
  // Called with (k, x_k) for k = 0..N.
  std::function<void(std::size_t, const BlockVector&)> on_iterate;
};

struct PrivateSolution {
  BlockVector x_pre;  // x_N
  BlockVector x_alg;  // projection of x_N + Z
  double sigma = 0.0;
  double sensitivity = 0.0;
  std::uint64_t seed = 0;
  // cost_trace[k-1] = F(x_k, Lambda_k) including the regularizer.
  std::vector<double> cost_trace;
  ModelConstants constants;
  PrivacyParams privacy;
  std::size_t days = 0;
  double step_tolerance = 0.0;
  double final_tolerance = 0.0;
};

// One pass of projected stochastic gradient descent, one day per step,
// followed by output perturbation with the Gaussian mechanism:
//   x_k = Proj(x_{k-1} - eta_{k-1} grad F(x_{k-1}, Lambda_k)),  k = 1..N
//   x_alg = Proj(x_N + Z),  Z ~ N(0, sigma^2 I).
// Throws InputError if x0 is infeasible or a day exceeds constants.lambda_max.
PrivateSolution PrivateSgd(DayStream& days, const FlowPolytope& polytope,
                           const LatencyModel& latency, const ModelConstants& constants,
                           const PrivacyParams& privacy, BlockVector x0, std::uint64_t seed,
                           const SgdOptions& options = {});
PrivateSolution PrivateSgd(const DemandDataset& dataset, const FlowPolytope& polytope,
                           const LatencyModel& latency, const ModelConstants& constants,
                           const PrivacyParams& privacy, BlockVector x0, std::uint64_t seed,
                           const SgdOptions& options = {});

// Output perturbation: projection of x_pre + Z, Z drawn by SampleGaussian.
BlockVector ReleasePolicy(const BlockVector& x_pre, const FlowPolytope& polytope, double sigma,
                          std::uint64_t seed, double tol = 1e-8);

// All-or-nothing assignment on free-flow shortest paths; the default x0.
BlockVector FreeFlowPolicy(const Network& network);

// Writes <prefix>_pre.csv, <prefix>_alg.csv (policy format),
// <prefix>_trace.csv (iteration, cost) and <prefix>_meta.json.
void WritePrivateSolution(const PrivateSolution& solution, const Network& network,
                          const std::filesystem::path& dir, const std::string& prefix);

}  // namespace dproute

#endif  // DPROUTE_DP_SGD_H_
