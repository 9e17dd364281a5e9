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

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "dproute/error.h"
#include "gtest/gtest.h"

namespace dproute {
namespace {

constexpr char kHeader[] =
    "<NUMBER OF ZONES> 2\n"
    "<NUMBER OF NODES> 2\n"
    "<FIRST THRU NODE> 1\n"
    "<NUMBER OF LINKS> 1\n"
    "<END OF METADATA>\n"
    "\n"
    "~ init_node term_node capacity length free_flow_time b power speed toll link_type ;\n";

std::string SiouxFallsNet() { return std::string(DPROUTE_TEST_DATA_DIR) + "/SiouxFalls_net.tntp"; }

int ParseErrorLine(const std::string& text) {
  std::istringstream in(text);
  try {
    ParseTntpNetwork(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

TEST(ParseTntpNetworkTest, SingleLink) {
  std::istringstream in(std::string(kHeader) + "\t1\t2\t10\t1\t5\t0.15\t4\t0\t0\t1\t;\n");
  const Network network = ParseTntpNetwork(in);
  ASSERT_EQ(network.node_count(), 2);
  ASSERT_EQ(network.edge_count(), 1);
  EXPECT_EQ(network.edge(0), (Edge{0, 1}));
  EXPECT_EQ(network.free_flow_time()[0], 5.0);
  EXPECT_EQ(network.capacity()[0], 10.0);
}

TEST(ParseTntpNetworkTest, SiouxFalls) {
  const Network network = ReadTntpNetworkFile(SiouxFallsNet());
  EXPECT_EQ(network.node_count(), 24);
  EXPECT_EQ(network.edge_count(), 76);
  EXPECT_EQ(network.edge(0), (Edge{0, 1}));
  EXPECT_EQ(network.EdgeIndex(0, 2), 1);
  for (double c : network.free_flow_time()) {
    EXPECT_GE(c, 2.0);
    EXPECT_LE(c, 10.0);
  }
}

TEST(ParseTntpNetworkTest, NodeOutOfRangeReportsLine) {
  std::string text = kHeader;
  text.replace(text.find("NODES> 2"), 8, "NODES> 24");
  text += "\t1\t25\t10\t1\t5\t0.15\t4\t0\t0\t1\t;\n";
  EXPECT_EQ(ParseErrorLine(text), 8);
}

TEST(ParseTntpNetworkTest, FieldCountMismatchReportsLine) {
  EXPECT_EQ(ParseErrorLine(std::string(kHeader) + "\t1\t2\t10\t1\t5\t;\n"), 8);
}

TEST(ParseTntpNetworkTest, DuplicateEdgeReportsLine) {
  std::string text = kHeader;
  text.replace(text.find("LINKS> 1"), 8, "LINKS> 2");
  text += "\t1\t2\t10\t1\t5\t0.15\t4\t0\t0\t1\t;\n";
  text += "\t1\t2\t10\t1\t5\t0.15\t4\t0\t0\t1\t;\n";
  EXPECT_EQ(ParseErrorLine(text), 9);
}

TEST(ParseTntpNetworkTest, MalformedHeaderRejected) {
  EXPECT_EQ(ParseErrorLine("<NUMBER OF NODES> two\n<NUMBER OF LINKS> 1\n<END OF METADATA>\n"), 1);
  EXPECT_GT(ParseErrorLine("<NUMBER OF LINKS> 1\n<END OF METADATA>\n"), 0);
  EXPECT_GT(ParseErrorLine("garbage\n"), 0);
}

TEST(ParseTntpNetworkTest, ZeroCapacityRejected) {
  EXPECT_EQ(ParseErrorLine(std::string(kHeader) + "\t1\t2\t0\t1\t5\t0.15\t4\t0\t0\t1\t;\n"), 8);
}

TEST(ParseTntpNetworkTest, MissingTerminatorRejected) {
  EXPECT_EQ(ParseErrorLine(std::string(kHeader) + "\t1\t2\t10\t1\t5\t0.15\t4\t0\t0\t1\n"), 8);
}

TEST(ParseTntpNetworkTest, LinkCountMismatchRejected) {
  std::string text = kHeader;
  text.replace(text.find("LINKS> 1"), 8, "LINKS> 3");
  EXPECT_GT(ParseErrorLine(text + "\t1\t2\t10\t1\t5\t0.15\t4\t0\t0\t1\t;\n"), 0);
}

TEST(NetworkTest, RoundTripThroughTntp) {
  const Network network = ReadTntpNetworkFile(SiouxFallsNet());
  std::stringstream text;
  WriteTntpNetwork(network, text);
  EXPECT_EQ(ParseTntpNetwork(text), network);
}

TEST(NetworkTest, ParsingTwiceGivesSameIndex) {
  const Network a = ReadTntpNetworkFile(SiouxFallsNet());
  const Network b = ReadTntpNetworkFile(SiouxFallsNet());
  for (int e = 0; e < a.edge_count(); ++e) {
    EXPECT_EQ(a.EdgeIndex(a.edge(e).tail, a.edge(e).head), e);
    EXPECT_EQ(b.EdgeIndex(a.edge(e).tail, a.edge(e).head), e);
  }
}

TEST(NetworkTest, RejectsInvalidConstruction) {
  EXPECT_THROW(Network(1, {}, {}, {}), InputError);
  EXPECT_THROW(Network(2, {{0, 0}}, {1}, {1}), InputError);
  EXPECT_THROW(Network(2, {{0, 2}}, {1}, {1}), InputError);
  EXPECT_THROW(Network(2, {{0, 1}, {0, 1}}, {1, 1}, {1, 1}), InputError);
  EXPECT_THROW(Network(2, {{0, 1}}, {-1}, {1}), InputError);
  EXPECT_THROW(Network(2, {{0, 1}}, {1}, {0}), InputError);
}

TEST(NetworkTest, CapacityDivisor) {
  const Network network(2, {{0, 1}}, {5}, {120});
  EXPECT_EQ(network.WithCapacityDivisor(60).capacity()[0], 2.0);
}

TEST(AffineLatencyTest, Doubling) {
  const LatencyModel latency = AffineLatencyFrom(Network(2, {{0, 1}}, {4}, {8}), 2.0);
  EXPECT_EQ(latency.slope()[0], 0.5);
  EXPECT_EQ(latency.Latency(0, 8.0), 8.0);
}

TEST(AffineLatencyTest, FactorOneIsFlat) {
  const LatencyModel latency =
      AffineLatencyFrom(ReadTntpNetworkFile(SiouxFallsNet()), 1.0);
  for (double q : latency.slope()) EXPECT_EQ(q, 0.0);
  EXPECT_EQ(latency.slope_norm(), 0.0);
}

TEST(AffineLatencyTest, FactorFive) {
  const LatencyModel latency = AffineLatencyFrom(Network(2, {{0, 1}}, {3}, {6}), 5.0);
  EXPECT_EQ(latency.slope()[0], 2.0);
  EXPECT_EQ(latency.Latency(0, 6.0), 15.0);
}

TEST(AffineLatencyTest, FactorBelowOneRejected) {
  EXPECT_THROW(AffineLatencyFrom(Network(2, {{0, 1}}, {3}, {6}), 0.9), InputError);
}

TEST(AffineLatencyTest, LatencyAtCapacityIsFactorTimesFreeFlow) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> c(0.1, 20.0);
  std::uniform_real_distribution<double> cap(0.5, 5000.0);
  std::uniform_real_distribution<double> f(1.0, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double ce = c(gen);
    const double ke = cap(gen);
    const double factor = f(gen);
    const LatencyModel latency = AffineLatencyFrom(Network(2, {{0, 1}}, {ce}, {ke}), factor);
    EXPECT_NEAR(latency.Latency(0, ke) / (factor * ce), 1.0, 1e-12);
  }
}

TEST(LatencyModelTest, SlopeNormIsMaxSlope) {
  const LatencyModel latency({0.5, 2.5, 1.0}, {1, 1, 1});
  EXPECT_EQ(latency.slope_norm(), 2.5);
  EXPECT_THROW(LatencyModel({-1.0}, {1.0}), InputError);
}

}  // namespace
}  // namespace dproute
