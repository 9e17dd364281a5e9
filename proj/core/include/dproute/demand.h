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

#ifndef DPROUTE_DEMAND_H_
#define DPROUTE_DEMAND_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dproute/network.h"

namespace dproute {

// Dense n x n matrix of arrival rates (requests per minute). The diagonal is
// always zero and all entries are nonnegative.
class DemandMatrix {
 public:
  explicit DemandMatrix(int node_count);

  int node_count() const { return n_; }
  double operator()(int origin, int destination) const { return rates_[Index(origin, destination)]; }
  double at(OdPair od) const { return (*this)(od.origin, od.destination); }
  // Throws InputError on a negative or non-finite rate. Writes to the
  // diagonal are ignored.
  void Set(int origin, int destination, double rate);
  // Entries in row-major pair order (o * n + d), the order used for vec(Lambda).
  std::span<const double> rates() const { return rates_; }

  DemandMatrix Scaled(double factor) const;
  double MaxEntry() const;
  // ||vec(Lambda)||_2^2
  double SquaredNorm() const;

  friend bool operator==(const DemandMatrix&, const DemandMatrix&) = default;

 private:
  std::size_t Index(int o, int d) const { return static_cast<std::size_t>(o) * n_ + d; }

  int n_;
  std::vector<double> rates_;
};

// Ordered daily demand matrices over an operation period of T minutes.
class DemandDataset {
 public:
  DemandDataset(std::vector<DemandMatrix> days, double period_minutes,
                std::optional<std::uint64_t> seed = std::nullopt);

  std::size_t size() const { return days_.size(); }
  int node_count() const { return days_.front().node_count(); }
  double period() const { return period_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  // 0-based day index.
  const DemandMatrix& day(std::size_t t) const { return days_[t]; }
  std::span<const DemandMatrix> days() const { return days_; }

  friend bool operator==(const DemandDataset&, const DemandDataset&) = default;

 private:
  std::vector<DemandMatrix> days_;
  double period_;
  std::optional<std::uint64_t> seed_;
};

enum class Perturbation { kAdd, kRemove };

// Parses the TNTP `_trips.tntp` format. Flows are read as vehicles/hour and
// converted to requests/minute (divided by 60). Origin/destination ids must
// be in [1, zones]; `node_count` overrides the zone count when larger.
DemandMatrix ParseTntpTrips(std::istream& in, std::optional<int> node_count = std::nullopt);
DemandMatrix ReadTntpTripsFile(const std::string& path,
                               std::optional<int> node_count = std::nullopt);

// Draws count_t(o,d) ~ Poisson(mean(o,d) * T) and stores count / T. Day t
// uses the RNG substream (seed, t), so days are independent of evaluation
// order.
DemandDataset SampleDataset(const DemandMatrix& mean_demand, std::size_t days,
                            double period_minutes, std::uint64_t seed);

// Copy of `dataset` with day t (0-based) entry `od` moved by exactly +-1/T.
DemandDataset MakeAdjacent(const DemandDataset& dataset, std::size_t t, OdPair od,
                           Perturbation direction);

// True iff exactly one (day, pair) entry differs, by at most 1/T (+1e-12).
bool IsAdjacent(const DemandDataset& a, const DemandDataset& b);

double LambdaMax(const DemandDataset& dataset);
DemandMatrix AverageDemand(const DemandDataset& dataset);

// CSV (day, origin, destination, rate) with 1-based ids and zero rates
// omitted, plus a `<csv>.meta.json` sidecar holding n, N, T and seed.
void WriteDatasetCsv(const DemandDataset& dataset, const std::filesystem::path& csv_path);
DemandDataset ReadDatasetCsv(const std::filesystem::path& csv_path);

}  // namespace dproute

#endif  // DPROUTE_DEMAND_H_
