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

#ifndef DPROUTE_AUDIT_H_
#define DPROUTE_AUDIT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dproute/demand.h"
#include "dproute/network.h"
#include "dproute/objective.h"

namespace dproute {

struct AuditConfig {
  Network network;
  LatencyModel latency;
  DemandMatrix mean_demand;
  std::size_t days = 20;
  double period = 60.0;
  double alpha = 1.0;
  ConstantsConvention convention = ConstantsConvention::kPaperFormula;
  double step_tolerance = 1e-10;
  double final_tolerance = 1e-10;
  std::uint64_t seed = 0;
};

struct AuditTrial {
  std::size_t trial = 0;
  std::size_t day = 0;  // 0-based
  OdPair od;
  Perturbation direction = Perturbation::kAdd;
  double distance = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

struct AuditReport {
  std::vector<AuditTrial> trials;
  double max_ratio = 0.0;
  double max_slack = 0.0;
  bool passed = false;

  std::string Summary() const;
};

// Bound on ||x_N(L) - x_N(L')|| for request-level-adjacent datasets:
// min(C min(1, 2 alpha) / (beta T), C / (alpha T N)).
double SensitivityBound(const ModelConstants& constants, std::size_t days);

// Final pre-noise iterates on two datasets, noise disabled, same x0.
double PreNoiseDistance(const AuditConfig& config, const DemandDataset& a, const DemandDataset& b);

// Each trial samples a dataset from the trial's own substream, perturbs one
// uniformly drawn (day, pair) entry by 1/T and compares the noiseless final
// iterates against the bound. Constants use lambda_max over both datasets.
// A trial passes when ratio <= 1 + 10 N step_tolerance / bound. Trials are
// independent and run in parallel; the report is in trial order.
AuditReport AuditSensitivity(const AuditConfig& config, std::size_t trials);

// CSV with columns trial, t, o, d, distance, bound, ratio (1-based t, o, d).
void WriteAuditCsv(const AuditReport& report, const std::filesystem::path& path);

struct ImpossibilityReport {
  OdPair od;
  // Distinguisher outputs on (base, base + 1/T at od), full solutions.
  bool detected_base = false;
  bool detected_adjacent = false;
  // Same on released total edge flows only.
  bool detected_base_total = false;
  bool detected_adjacent_total = false;

  bool Separated() const {
    return !detected_base && detected_adjacent && !detected_base_total &&
           detected_adjacent_total;
  }
  std::string Summary() const;
};

// Standard-formulation leak: with both endpoints of `od` otherwise silent, the
// net flow at od.destination reveals whether the one extra request exists.
// Throws InputError unless base_demand has zero rows and columns at both
// endpoints.
ImpossibilityReport DemoImpossibility(const Network& network, const DemandMatrix& base_demand,
                                      OdPair od, double period);

}  // namespace dproute

#endif  // DPROUTE_AUDIT_H_
