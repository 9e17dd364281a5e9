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

#include "dproute/network.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "dproute/csv.h"
#include "dproute/error.h"

namespace dproute {
namespace {

long long EdgeKey(int tail, int head) {
  return (static_cast<long long>(tail) << 32) | static_cast<unsigned>(head);
}

std::string_view Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

// Value following a `<TAG>` metadata label, or nullopt if the line has a
// different tag.
std::optional<std::string_view> MetadataValue(std::string_view line, std::string_view tag) {
  if (line.substr(0, tag.size()) != tag) return std::nullopt;
  return Trim(line.substr(tag.size()));
}

long long ParseCount(std::string_view text, std::size_t line_no, std::string_view what) {
  long long value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line_no, "malformed " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

double ParseReal(const std::string& token, std::size_t line_no, std::string_view what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || token.empty()) {
    throw ParseError(line_no, "malformed " + std::string(what) + ": '" + token + "'");
  }
  return value;
}

}  // namespace

Network::Network(int node_count, std::vector<Edge> edges, std::vector<double> free_flow_time,
                 std::vector<double> capacity)
    : node_count_(node_count),
      edges_(std::move(edges)),
      free_flow_time_(std::move(free_flow_time)),
      capacity_(std::move(capacity)) {
  if (node_count_ < 2) throw InputError("network needs at least 2 nodes");
  if (free_flow_time_.size() != edges_.size() || capacity_.size() != edges_.size()) {
    throw InputError("per-edge attribute length does not match edge count");
  }
  out_edges_.resize(node_count_);
  in_edges_.resize(node_count_);
  for (int e = 0; e < edge_count(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.tail < 0 || edge.tail >= node_count_ || edge.head < 0 ||
        edge.head >= node_count_) {
      throw InputError("edge " + std::to_string(e) + " has an endpoint out of range");
    }
    if (edge.tail == edge.head) throw InputError("edge " + std::to_string(e) + " is a self loop");
    if (!(free_flow_time_[e] >= 0.0)) {
      throw InputError("edge " + std::to_string(e) + " has negative free-flow time");
    }
    if (!(capacity_[e] > 0.0)) {
      throw InputError("edge " + std::to_string(e) + " has nonpositive capacity");
    }
    if (!index_.emplace(EdgeKey(edge.tail, edge.head), e).second) {
      throw InputError("duplicate edge " + std::to_string(edge.tail + 1) + "->" +
                       std::to_string(edge.head + 1));
    }
    out_edges_[edge.tail].push_back(e);
    in_edges_[edge.head].push_back(e);
  }
}

std::optional<int> Network::EdgeIndex(int tail, int head) const {
  const auto it = index_.find(EdgeKey(tail, head));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Network Network::WithCapacityDivisor(double divisor) const {
  if (!(divisor > 0.0)) throw InputError("capacity divisor must be positive");
  std::vector<double> scaled = capacity_;
  for (double& c : scaled) c /= divisor;
  return Network(node_count_, edges_, free_flow_time_, std::move(scaled));
}

LatencyModel::LatencyModel(std::vector<double> slope, std::vector<double> free_flow_time)
    : slope_(std::move(slope)), free_flow_time_(std::move(free_flow_time)) {
  if (slope_.size() != free_flow_time_.size()) {
    throw InputError("slope and free-flow vectors differ in length");
  }
  for (std::size_t e = 0; e < slope_.size(); ++e) {
    if (!(slope_[e] >= 0.0) || !(free_flow_time_[e] >= 0.0)) {
      throw InputError("latency coefficients must be nonnegative");
    }
    slope_norm_ = std::max(slope_norm_, slope_[e]);
  }
}

Network ParseTntpNetwork(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  long long nodes = -1;
  long long links = -1;
  bool metadata_done = false;
  bool header_seen = false;

  std::vector<Edge> edges;
  std::vector<double> free_flow;
  std::vector<double> capacity;
  std::unordered_map<long long, std::size_t> seen;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty()) continue;
    if (!metadata_done) {
      if (auto v = MetadataValue(line, "<NUMBER OF NODES>")) {
        nodes = ParseCount(*v, line_no, "node count");
      } else if (auto v = MetadataValue(line, "<NUMBER OF LINKS>")) {
        links = ParseCount(*v, line_no, "link count");
      } else if (line.starts_with("<END OF METADATA>")) {
        metadata_done = true;
        if (nodes < 2) throw ParseError(line_no, "missing or invalid <NUMBER OF NODES>");
        if (links < 0) throw ParseError(line_no, "missing or invalid <NUMBER OF LINKS>");
      } else if (!line.starts_with("<")) {
        throw ParseError(line_no, "unexpected line before <END OF METADATA>");
      }
      continue;
    }
    if (line.front() == '~') {
      header_seen = true;
      continue;
    }
    if (!header_seen) throw ParseError(line_no, "data row before '~' header line");
    if (line.back() != ';') throw ParseError(line_no, "link row not terminated by ';'");
    std::istringstream fields{std::string(line.substr(0, line.size() - 1))};
    std::vector<std::string> tokens;
    for (std::string token; fields >> token;) tokens.push_back(token);
    if (tokens.size() != 10) {
      throw ParseError(line_no, "expected 10 link fields, found " + std::to_string(tokens.size()));
    }
    const long long tail = ParseCount(tokens[0], line_no, "init_node");
    const long long head = ParseCount(tokens[1], line_no, "term_node");
    if (tail < 1 || tail > nodes || head < 1 || head > nodes) {
      throw ParseError(line_no, "node id out of range [1, " + std::to_string(nodes) + "]");
    }
    if (tail == head) throw ParseError(line_no, "self loop");
    const double cap = ParseReal(tokens[2], line_no, "capacity");
    ParseReal(tokens[3], line_no, "length");
    const double fft = ParseReal(tokens[4], line_no, "free_flow_time");
    for (int k = 5; k < 9; ++k) ParseReal(tokens[k], line_no, "link attribute");
    ParseCount(tokens[9], line_no, "link type");
    if (!(cap > 0.0)) throw ParseError(line_no, "capacity must be positive");
    if (!(fft >= 0.0)) throw ParseError(line_no, "free_flow_time must be nonnegative");
    const long long key = EdgeKey(static_cast<int>(tail - 1), static_cast<int>(head - 1));
    if (!seen.emplace(key, line_no).second) {
      throw ParseError(line_no, "duplicate edge " + tokens[0] + "->" + tokens[1]);
    }
    edges.push_back({static_cast<int>(tail - 1), static_cast<int>(head - 1)});
    capacity.push_back(cap);
    free_flow.push_back(fft);
  }
  if (!metadata_done) throw ParseError(line_no, "missing <END OF METADATA>");
  if (static_cast<long long>(edges.size()) != links) {
    throw ParseError(line_no, "declared " + std::to_string(links) + " links but found " +
                                  std::to_string(edges.size()));
  }
  return Network(static_cast<int>(nodes), std::move(edges), std::move(free_flow),
                 std::move(capacity));
}

Network ReadTntpNetworkFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open network file " + path);
  return ParseTntpNetwork(in);
}

void WriteTntpNetwork(const Network& network, std::ostream& out) {
  out << "<NUMBER OF ZONES> " << network.node_count() << "\n"
      << "<NUMBER OF NODES> " << network.node_count() << "\n"
      << "<FIRST THRU NODE> 1\n"
      << "<NUMBER OF LINKS> " << network.edge_count() << "\n"
      << "<END OF METADATA>\n\n"
      << "~\tinit_node\tterm_node\tcapacity\tlength\tfree_flow_time\tb\tpower\tspeed\ttoll"
         "\tlink_type\t;\n";
  for (int e = 0; e < network.edge_count(); ++e) {
    const Edge& edge = network.edge(e);
    const std::string fft = FormatDouble(network.free_flow_time()[e]);
    out << '\t' << edge.tail + 1 << '\t' << edge.head + 1 << '\t'
        << FormatDouble(network.capacity()[e]) << '\t' << fft << '\t' << fft
        << "\t0.15\t4\t0\t0\t1\t;\n";
  }
}

LatencyModel AffineLatencyFrom(const Network& network, double sensitivity_factor) {
  if (!(sensitivity_factor >= 1.0)) throw InputError("sensitivity factor must be >= 1");
  std::vector<double> slope(network.edge_count());
  for (int e = 0; e < network.edge_count(); ++e) {
    slope[e] = (sensitivity_factor - 1.0) * network.free_flow_time()[e] / network.capacity()[e];
  }
  const auto fft = network.free_flow_time();
  return LatencyModel(std::move(slope), std::vector<double>(fft.begin(), fft.end()));
}

}  // namespace dproute
