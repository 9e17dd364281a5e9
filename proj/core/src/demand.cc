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

#include "dproute/demand.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dproute/csv.h"
#include "dproute/error.h"
#include "dproute/rng.h"
#include "json.hpp"

namespace dproute {

DemandMatrix::DemandMatrix(int node_count) : n_(node_count) {
  if (node_count < 1) throw InputError("demand matrix needs at least one node");
  rates_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
}

void DemandMatrix::Set(int origin, int destination, double rate) {
  if (origin < 0 || origin >= n_ || destination < 0 || destination >= n_) {
    throw InputError("demand index out of range");
  }
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw InputError("demand rates must be finite and nonnegative");
  }
  if (origin == destination) return;
  rates_[Index(origin, destination)] = rate;
}

DemandMatrix DemandMatrix::Scaled(double factor) const {
  if (!(factor >= 0.0)) throw InputError("demand scale must be nonnegative");
  DemandMatrix out = *this;
  for (double& r : out.rates_) r *= factor;
  return out;
}

double DemandMatrix::MaxEntry() const { return *std::max_element(rates_.begin(), rates_.end()); }

double DemandMatrix::SquaredNorm() const {
  double sum = 0.0;
  for (double r : rates_) sum += r * r;
  return sum;
}

DemandDataset::DemandDataset(std::vector<DemandMatrix> days, double period_minutes,
                             std::optional<std::uint64_t> seed)
    : days_(std::move(days)), period_(period_minutes), seed_(seed) {
  if (days_.empty()) throw InputError("dataset needs at least one day");
  if (!(period_ > 0.0)) throw InputError("operation period T must be positive");
  for (const DemandMatrix& m : days_) {
    if (m.node_count() != days_.front().node_count()) {
      throw InputError("dataset days differ in dimension");
    }
  }
}

DemandMatrix ParseTntpTrips(std::istream& in, std::optional<int> node_count) {
  std::string raw;
  std::size_t line_no = 0;
  int zones = -1;
  bool metadata_done = false;
  int origin = -1;
  std::optional<DemandMatrix> demand;

  auto trim = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
  };

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (!metadata_done) {
      if (line.rfind("<NUMBER OF ZONES>", 0) == 0) {
        std::istringstream value(line.substr(17));
        if (!(value >> zones) || zones < 1) throw ParseError(line_no, "invalid <NUMBER OF ZONES>");
      } else if (line.rfind("<END OF METADATA>", 0) == 0) {
        if (zones < 1) throw ParseError(line_no, "missing <NUMBER OF ZONES>");
        const int n = std::max(zones, node_count.value_or(zones));
        if (n < 2) throw ParseError(line_no, "trips need at least 2 zones");
        demand.emplace(n);
        metadata_done = true;
      } else if (line.front() != '<') {
        throw ParseError(line_no, "unexpected line before <END OF METADATA>");
      }
      continue;
    }
    if (line.rfind("Origin", 0) == 0) {
      std::istringstream header(line.substr(6));
      int id = 0;
      std::string rest;
      if (!(header >> id) || (header >> rest) || id < 1 || id > zones) {
        throw ParseError(line_no, "malformed origin block header '" + line + "'");
      }
      origin = id - 1;
      continue;
    }
    if (origin < 0) throw ParseError(line_no, "entry outside an Origin block");
    // Entries look like `d : flow;`, possibly several per line.
    std::stringstream entries(line);
    std::string entry;
    while (std::getline(entries, entry, ';')) {
      entry = trim(entry);
      if (entry.empty()) continue;
      const auto colon = entry.find(':');
      if (colon == std::string::npos) throw ParseError(line_no, "entry missing ':'");
      std::istringstream dest_text(entry.substr(0, colon));
      std::istringstream flow_text(entry.substr(colon + 1));
      int dest = 0;
      double flow = 0.0;
      std::string extra;
      if (!(dest_text >> dest) || (dest_text >> extra) || !(flow_text >> flow) ||
          (flow_text >> extra)) {
        throw ParseError(line_no, "malformed entry '" + entry + "'");
      }
      if (dest < 1 || dest > zones) throw ParseError(line_no, "destination out of range");
      if (!(flow >= 0.0) || !std::isfinite(flow)) throw ParseError(line_no, "negative flow value");
      demand->Set(origin, dest - 1, flow / 60.0);
    }
  }
  if (!metadata_done) throw ParseError(line_no, "missing <END OF METADATA>");
  return *std::move(demand);
}

DemandMatrix ReadTntpTripsFile(const std::string& path, std::optional<int> node_count) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trips file " + path);
  return ParseTntpTrips(in, node_count);
}

DemandDataset SampleDataset(const DemandMatrix& mean_demand, std::size_t days,
                            double period_minutes, std::uint64_t seed) {
  if (days < 1) throw InputError("dataset needs at least one day");
  if (!(period_minutes > 0.0)) throw InputError("operation period T must be positive");
  const int n = mean_demand.node_count();
  std::vector<DemandMatrix> out;
  out.reserve(days);
  for (std::size_t t = 0; t < days; ++t) {
    CounterRng rng(seed, t);
    DemandMatrix day(n);
    for (int o = 0; o < n; ++o) {
      for (int d = 0; d < n; ++d) {
        if (o == d) continue;
        const double mean_count = mean_demand(o, d) * period_minutes;
        const auto count = rng.Poisson(mean_count);
        day.Set(o, d, static_cast<double>(count) / period_minutes);
      }
    }
    out.push_back(std::move(day));
  }
  return DemandDataset(std::move(out), period_minutes, seed);
}

DemandDataset MakeAdjacent(const DemandDataset& dataset, std::size_t t, OdPair od,
                           Perturbation direction) {
  if (t >= dataset.size()) throw InputError("day index out of range");
  const int n = dataset.node_count();
  if (od.origin < 0 || od.origin >= n || od.destination < 0 || od.destination >= n ||
      od.origin == od.destination) {
    throw InputError("perturbed pair must be an off-diagonal entry");
  }
  const double step = 1.0 / dataset.period();
  const double current = dataset.day(t).at(od);
  if (direction == Perturbation::kRemove && current < step * (1.0 - 1e-12)) {
    throw InputError("cannot remove a request from an entry below 1/T");
  }
  const double delta = direction == Perturbation::kAdd ? 1.0 : -1.0;
  // Rates that are whole counts over T are moved in count space, so that
  // adding and then removing a request restores the exact same double.
  const double count = current * dataset.period();
  const double rounded = std::round(count);
  double updated = current + delta * step;
  if (std::fabs(count - rounded) <= 1e-9 * std::max(1.0, rounded)) {
    updated = std::max(0.0, rounded + delta) / dataset.period();
  }
  std::vector<DemandMatrix> days(dataset.days().begin(), dataset.days().end());
  days[t].Set(od.origin, od.destination, updated);
  return DemandDataset(std::move(days), dataset.period(), dataset.seed());
}

bool IsAdjacent(const DemandDataset& a, const DemandDataset& b) {
  if (a.size() != b.size() || a.node_count() != b.node_count() || a.period() != b.period()) {
    throw InputError("datasets differ in shape");
  }
  const double limit = 1.0 / a.period() + 1e-12;
  std::size_t differing = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const auto ra = a.day(t).rates();
    const auto rb = b.day(t).rates();
    for (std::size_t i = 0; i < ra.size(); ++i) {
      if (ra[i] == rb[i]) continue;
      if (std::fabs(ra[i] - rb[i]) > limit) return false;
      if (++differing > 1) return false;
    }
  }
  return differing == 1;
}

double LambdaMax(const DemandDataset& dataset) {
  double best = 0.0;
  for (const DemandMatrix& m : dataset.days()) best = std::max(best, m.MaxEntry());
  return best;
}

DemandMatrix AverageDemand(const DemandDataset& dataset) {
  const int n = dataset.node_count();
  std::vector<double> sum(static_cast<std::size_t>(n) * n, 0.0);
  for (const DemandMatrix& m : dataset.days()) {
    const auto r = m.rates();
    for (std::size_t i = 0; i < r.size(); ++i) sum[i] += r[i];
  }
  DemandMatrix mean(n);
  const double count = static_cast<double>(dataset.size());
  for (int o = 0; o < n; ++o) {
    for (int d = 0; d < n; ++d) mean.Set(o, d, sum[static_cast<std::size_t>(o) * n + d] / count);
  }
  return mean;
}

void WriteDatasetCsv(const DemandDataset& dataset, const std::filesystem::path& csv_path) {
  {
    CsvWriter csv(csv_path, {"day", "origin", "destination", "rate"});
    const int n = dataset.node_count();
    for (std::size_t t = 0; t < dataset.size(); ++t) {
      for (int o = 0; o < n; ++o) {
        for (int d = 0; d < n; ++d) {
          const double rate = dataset.day(t)(o, d);
          if (rate == 0.0) continue;
          csv << t + 1 << o + 1 << d + 1 << rate;
          csv.EndRow();
        }
      }
    }
  }
  nlohmann::ordered_json meta;
  meta["n"] = dataset.node_count();
  meta["N"] = dataset.size();
  meta["T"] = dataset.period();
  if (dataset.seed()) meta["seed"] = *dataset.seed();
  std::ofstream out(csv_path.string() + ".meta.json", std::ios::binary | std::ios::trunc);
  out << meta.dump(2) << "\n";
}

DemandDataset ReadDatasetCsv(const std::filesystem::path& csv_path) {
  std::ifstream meta_in(csv_path.string() + ".meta.json");
  if (!meta_in) throw InputError("missing dataset metadata for " + csv_path.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("dataset metadata: ") + e.what());
  }
  const int n = meta.at("n").get<int>();
  const std::size_t days = meta.at("N").get<std::size_t>();
  const double period = meta.at("T").get<double>();
  std::optional<std::uint64_t> seed;
  if (meta.contains("seed")) seed = meta["seed"].get<std::uint64_t>();

  std::vector<DemandMatrix> matrices(days, DemandMatrix(n));
  std::ifstream in(csv_path);
  if (!in) throw InputError("cannot open " + csv_path.string());
  std::string line;
  std::size_t line_no = 1;
  std::getline(in, line);
  if (line != "day,origin,destination,rate") throw ParseError(1, "unexpected dataset header");
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field[4];
    for (auto& f : field) {
      if (!std::getline(row, f, ',')) throw ParseError(line_no, "expected 4 columns");
    }
    try {
      const std::size_t t = std::stoul(field[0]);
      const int o = std::stoi(field[1]);
      const int d = std::stoi(field[2]);
      if (t < 1 || t > days || o < 1 || o > n || d < 1 || d > n) {
        throw ParseError(line_no, "index out of range");
      }
      matrices[t - 1].Set(o - 1, d - 1, std::stod(field[3]));
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "malformed dataset row");
    }
  }
  return DemandDataset(std::move(matrices), period, seed);
}

}  // namespace dproute
