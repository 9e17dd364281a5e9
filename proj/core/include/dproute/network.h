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

#ifndef DPROUTE_NETWORK_H_
#define DPROUTE_NETWORK_H_

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace dproute {

// Directed link between 0-based node ids. File formats use 1-based ids.
struct Edge {
  int tail = 0;
  int head = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Origin-destination pair of 0-based node ids.
struct OdPair {
  int origin = 0;
  int destination = 0;

  friend bool operator==(const OdPair&, const OdPair&) = default;
};

// Immutable directed road network. The order of `edges()` is fixed at
// construction and is the coordinate order of every per-edge vector.
class Network {
 public:
  // Throws InputError unless node_count >= 2, endpoints are in range, there
  // are no self loops or duplicate edges, free-flow times are >= 0 and
  // capacities are > 0.
  Network(int node_count, std::vector<Edge> edges, std::vector<double> free_flow_time,
          std::vector<double> capacity);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }
  std::span<const double> free_flow_time() const { return free_flow_time_; }
  std::span<const double> capacity() const { return capacity_; }

  std::optional<int> EdgeIndex(int tail, int head) const;
  // Edge ids leaving / entering a node, in increasing edge order.
  std::span<const int> OutEdges(int node) const { return out_edges_[node]; }
  std::span<const int> InEdges(int node) const { return in_edges_[node]; }

  // Copy with every capacity divided by `divisor` (e.g. 60 to turn
  // vehicles/hour into vehicles/minute).
  Network WithCapacityDivisor(double divisor) const;

  friend bool operator==(const Network& a, const Network& b) {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_ &&
           a.free_flow_time_ == b.free_flow_time_ && a.capacity_ == b.capacity_;
  }

 private:
  int node_count_;
  std::vector<Edge> edges_;
  std::vector<double> free_flow_time_;
  std::vector<double> capacity_;
  std::unordered_map<long long, int> index_;
  std::vector<std::vector<int>> out_edges_;
  std::vector<std::vector<int>> in_edges_;
};

// Affine link latency f_e(y) = q_e * y + c_e.
class LatencyModel {
 public:
  LatencyModel(std::vector<double> slope, std::vector<double> free_flow_time);

  std::span<const double> slope() const { return slope_; }
  std::span<const double> free_flow_time() const { return free_flow_time_; }
  int edge_count() const { return static_cast<int>(slope_.size()); }
  // Operator norm of diag(q): the largest slope.
  double slope_norm() const { return slope_norm_; }
  double Latency(int e, double flow) const { return slope_[e] * flow + free_flow_time_[e]; }

 private:
  std::vector<double> slope_;
  std::vector<double> free_flow_time_;
  double slope_norm_ = 0.0;
};

// Parses the TNTP `_net.tntp` format. Extra link columns (length, b, power,
// speed, toll, type) are read and discarded.
Network ParseTntpNetwork(std::istream& in);
Network ReadTntpNetworkFile(const std::string& path);
void WriteTntpNetwork(const Network& network, std::ostream& out);

// Slopes chosen so that latency at capacity equals sensitivity_factor times
// the free-flow time: q_e = (factor - 1) * c_e / cap_e.
LatencyModel AffineLatencyFrom(const Network& network, double sensitivity_factor);

}  // namespace dproute

#endif  // DPROUTE_NETWORK_H_
