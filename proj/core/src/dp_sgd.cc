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

#include "dproute/dp_sgd.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "dproute/csv.h"
#include "dproute/error.h"
#include "dproute/rng.h"
#include "json.hpp"

namespace dproute {
namespace {

// Substream id for output-perturbation noise ("noise" in ASCII).
constexpr std::uint64_t kNoiseStream = 0x6e6f697365ull;

}  // namespace

void PrivacyParams::Validate() const {
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
}

double StepSize(std::size_t k, double alpha, double beta) {
  if (k < 1) throw InputError("iteration index starts at 1");
  if (!(alpha > 0.0) || !(beta >= alpha)) throw InputError("step size needs beta >= alpha > 0");
  return std::min(1.0 / (alpha * static_cast<double>(k)), std::min(1.0, 2.0 * alpha) / beta);
}

double Sensitivity(const ModelConstants& constants, std::size_t days) {
  if (days < 1) throw InputError("dataset needs at least one day");
  const double alpha = constants.alpha;
  return constants.C / constants.T *
         std::min(std::min(1.0, 2.0 * alpha) / constants.beta,
                  1.0 / (alpha * static_cast<double>(days)));
}

double GaussianNoiseScale(const ModelConstants& constants, std::size_t days,
                          const PrivacyParams& privacy) {
  privacy.Validate();
  const double s = Sensitivity(constants, days);
  return s / privacy.epsilon * std::sqrt(2.0 * std::log(1.25 / privacy.delta));
}

std::vector<double> SampleGaussian(double sigma, std::size_t dim, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InputError("sigma must be nonnegative");
  std::vector<double> z(dim, 0.0);
  if (sigma == 0.0) return z;
  CounterRng rng(seed, kNoiseStream);
  for (double& v : z) v = sigma * rng.Gaussian();
  return z;
}

DayStream::DayStream(const DemandDataset& dataset)
    : dataset_(dataset), reads_(dataset.size(), 0) {}

const DemandMatrix& DayStream::Next() {
  if (Done()) throw std::logic_error("day stream exhausted");
  ++reads_[next_];
  return dataset_.day(next_++);
}

PrivateSolution PrivateSgd(DayStream& days, const FlowPolytope& polytope,
                           const LatencyModel& latency, const ModelConstants& constants,
                           const PrivacyParams& privacy, BlockVector x0, std::uint64_t seed,
                           const SgdOptions& options) {
  privacy.Validate();
  const Network& network = polytope.network();
  if (x0.node_count() != network.node_count() || x0.edge_count() != network.edge_count()) {
    throw InputError("initial policy shape does not match network");
  }
  if (polytope.PolicyViolation(x0) > 1e-6) throw InputError("initial policy is infeasible");
  if (constants.T != days.period()) {
    throw InputError("constants were computed for a different operation period");
  }
  const std::size_t total_days = days.size();

  PrivateSolution out;
  out.seed = seed;
  out.constants = constants;
  out.privacy = privacy;
  out.days = total_days;
  out.step_tolerance = options.step_tolerance;
  out.final_tolerance = options.final_tolerance;
  out.sensitivity = Sensitivity(constants, total_days);
  out.sigma = options.sigma_override ? *options.sigma_override
                                     : GaussianNoiseScale(constants, total_days, privacy);
  out.cost_trace.reserve(total_days);

  BlockVector x = std::move(x0);
  BlockVector gradient(x.node_count(), x.edge_count());
  if (options.on_iterate) options.on_iterate(0, x);
  for (std::size_t k = 1; k <= total_days; ++k) {
    const DemandMatrix& demand = days.Next();
    if (demand.MaxEntry() > constants.lambda_max * (1.0 + 1e-12)) {
      throw InputError("day " + std::to_string(k) + " exceeds lambda_max");
    }
    const double eta = StepSize(k, constants.alpha, constants.beta);
    GradientInto(x, demand, latency, constants.alpha, gradient);
    auto xs = x.values();
    const auto gs = gradient.values();
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] -= eta * gs[i];
    x = polytope.ProjectPolicy(x, options.step_tolerance);
    out.cost_trace.push_back(RegularizedCost(x, demand, latency, constants.alpha));
    if (options.on_iterate) options.on_iterate(k, x);
  }

  out.x_alg = ReleasePolicy(x, polytope, out.sigma, seed, options.final_tolerance);
  out.x_pre = std::move(x);
  return out;
}

BlockVector ReleasePolicy(const BlockVector& x_pre, const FlowPolytope& polytope, double sigma,
                          std::uint64_t seed, double tol) {
  BlockVector noisy = x_pre;
  const std::vector<double> noise = SampleGaussian(sigma, noisy.size(), seed);
  auto ns = noisy.values();
  for (std::size_t i = 0; i < ns.size(); ++i) ns[i] += noise[i];
  return polytope.ProjectPolicy(noisy, tol);
}

PrivateSolution PrivateSgd(const DemandDataset& dataset, const FlowPolytope& polytope,
                           const LatencyModel& latency, const ModelConstants& constants,
                           const PrivacyParams& privacy, BlockVector x0, std::uint64_t seed,
                           const SgdOptions& options) {
  DayStream days(dataset);
  return PrivateSgd(days, polytope, latency, constants, privacy, std::move(x0), seed, options);
}

BlockVector FreeFlowPolicy(const Network& network) {
  return AllOrNothingPolicy(network.free_flow_time(), network);
}

void WritePrivateSolution(const PrivateSolution& solution, const Network& network,
                          const std::filesystem::path& dir, const std::string& prefix) {
  WritePolicyCsv(solution.x_pre, network, dir / (prefix + "_pre.csv"));
  WritePolicyCsv(solution.x_alg, network, dir / (prefix + "_alg.csv"));
  {
    CsvWriter trace(dir / (prefix + "_trace.csv"), {"iteration", "cost"});
    for (std::size_t k = 0; k < solution.cost_trace.size(); ++k) {
      trace << k + 1 << solution.cost_trace[k];
      trace.EndRow();
    }
  }
  const ModelConstants& c = solution.constants;
  nlohmann::ordered_json meta;
  meta["N"] = solution.days;
  meta["T"] = c.T;
  meta["epsilon"] = solution.privacy.epsilon;
  meta["delta"] = solution.privacy.delta;
  meta["sigma"] = FormatDouble(solution.sigma);
  meta["sensitivity"] = FormatDouble(solution.sensitivity);
  meta["seed"] = solution.seed;
  meta["constants"] = {{"convention", ConventionName(c.convention)},
                       {"lambda_max", FormatDouble(c.lambda_max)},
                       {"alpha", FormatDouble(c.alpha)},
                       {"beta", FormatDouble(c.beta)},
                       {"C", FormatDouble(c.C)},
                       {"K", FormatDouble(c.K)}};
  meta["step_tolerance"] = solution.step_tolerance;
  meta["final_tolerance"] = solution.final_tolerance;
  meta["cost_trace"] = prefix + "_trace.csv";
  std::ofstream out(dir / (prefix + "_meta.json"), std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write metadata in " + dir.string());
  out << meta.dump(2) << "\n";
}

}  // namespace dproute
