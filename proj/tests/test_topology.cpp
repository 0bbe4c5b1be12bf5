#include "telab/topology.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace telab;

TEST(Topology, ParsesFixtureAndNormalizesEndpoints) {
  Topology t = oracles::load_fixture("triangle.json");
  EXPECT_EQ(t.name, "triangle");
  EXPECT_EQ(t.node_count(), 3);
  EXPECT_EQ(t.edge_count(), 3);
  for (const Edge& e : t.edges) EXPECT_LT(e.u, e.v);
  EXPECT_EQ(t.index_of("b"), 1);
  EXPECT_TRUE(t.find_edge(2, 0).has_value());  // c-a given as a-c
  EXPECT_FALSE(t.find_edge(0, 0).has_value());
}

TEST(Topology, UnknownNodeThrows) {
  Topology t = oracles::load_fixture("triangle.json");
  try {
    t.index_of("zzz");
    FAIL() << "expected unknown-name error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unknown_name);
  }
}

TEST(Topology, RoundTripSerialization) {
  Topology t = oracles::load_fixture("wan12.json");
  Topology again = parse_topology(serialize_topology(t));
  EXPECT_EQ(again.nodes, t.nodes);
  ASSERT_EQ(again.edge_count(), t.edge_count());
  for (int k = 0; k < t.edge_count(); ++k) {
    EXPECT_EQ(again.edges[k].u, t.edges[k].u);
    EXPECT_EQ(again.edges[k].v, t.edges[k].v);
    EXPECT_EQ(again.edges[k].capacity, t.edges[k].capacity);
    EXPECT_EQ(again.edges[k].weight, t.edges[k].weight);
  }
  // serialization itself is stable
  EXPECT_EQ(serialize_topology(again), serialize_topology(t));
}

TEST(Topology, ValidateRejectsStructuralProblems) {
  std::vector<std::string> nodes{"a", "b"};
  {
    Topology t;
    t.nodes = nodes;
    t.edges = {{0, 0, 1.0, 1.0}};
    Validation v = validate(t);
    EXPECT_FALSE(v.ok());
  }
  {
    Topology t;
    t.nodes = nodes;
    t.edges = {{0, 1, 1.0, 1.0}, {0, 1, 2.0, 1.0}};
    EXPECT_FALSE(validate(t).ok());
  }
  {
    Topology t;
    t.nodes = nodes;
    t.edges = {{0, 1, 0.0, 1.0}};  // nonpositive capacity
    EXPECT_FALSE(validate(t).ok());
  }
  {
    Topology t;
    t.nodes = nodes;
    t.edges = {{0, 1, 1.0, -2.0}};  // negative weight
    EXPECT_FALSE(validate(t).ok());
  }
  {
    Topology t;
    t.nodes = {"a", "b", "c"};
    t.edges = {{0, 1, 1.0, 1.0}};
    Validation v = validate(t);
    EXPECT_TRUE(v.ok());
    ASSERT_EQ(v.advisories.size(), 1u);  // c isolated
  }
}

TEST(Topology, ParseRejectsMalformedJson) {
  EXPECT_THROW(parse_topology("{not json"), Error);
  EXPECT_THROW(parse_topology("{\"nodes\": []}"), Error);
  try {
    parse_topology("[1,2,3]");
    FAIL() << "expected parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
  }
  // edge referencing an undeclared node
  EXPECT_THROW(
      parse_topology(R"({"nodes":["a"],"edges":)"
                     R"([{"u":"a","v":"x","capacity":1}]})"),
      Error);
}

TEST(Topology, GraphmlSubsetImport) {
  Topology t = oracles::load_fixture("small.graphml");
  EXPECT_EQ(t.name, "small");
  EXPECT_EQ(t.node_count(), 3);
  ASSERT_EQ(t.edge_count(), 3);
  int xy = *t.find_edge(t.index_of("x"), t.index_of("y"));
  int yz = *t.find_edge(t.index_of("y"), t.index_of("z"));
  int xz = *t.find_edge(t.index_of("x"), t.index_of("z"));
  EXPECT_DOUBLE_EQ(t.edges[xy].capacity, 2.5);
  EXPECT_DOUBLE_EQ(t.edges[yz].capacity, 1.5);
  EXPECT_DOUBLE_EQ(t.edges[xz].capacity, 1.0);  // default
}

TEST(Topology, UnitDigraphArcPairing) {
  Topology t = oracles::load_fixture("square.json");
  UnitDigraph g = to_unit_digraph(t);
  ASSERT_EQ(g.arcs.size(), 2u * t.edge_count());
  for (int a = 0; a < static_cast<int>(g.arcs.size()); ++a) {
    const auto& fwd = g.arcs[a];
    const auto& rev = g.arcs[a ^ 1];
    EXPECT_EQ(fwd.from, rev.to);
    EXPECT_EQ(fwd.to, rev.from);
    EXPECT_EQ(fwd.edge, rev.edge);
    EXPECT_EQ(fwd.edge, a / 2);
  }
  int listed = 0;
  for (const auto& lst : g.out) listed += static_cast<int>(lst.size());
  EXPECT_EQ(listed, static_cast<int>(g.arcs.size()));
}

TEST(TrafficMatrix, ParseValidateAndDemandSet) {
  Topology t = oracles::load_fixture("triangle.json");
  TrafficMatrix tm = parse_traffic_matrix(
      R"({"demands":[{"src":"a","dst":"c","demand":1.5},)"
      R"({"src":"b","dst":"a","demand":0.0}]})");
  EXPECT_DOUBLE_EQ(tm.total(), 1.5);
  std::vector<Demand> ds = demand_set(t, tm);
  ASSERT_EQ(ds.size(), 1u);  // zero entry dropped
  EXPECT_EQ(ds[0].src, 0);
  EXPECT_EQ(ds[0].dst, 2);
  EXPECT_DOUBLE_EQ(ds[0].value, 1.5);

  EXPECT_THROW(parse_traffic_matrix(
                   R"({"demands":[{"src":"a","dst":"a","demand":1}]})"),
               Error);
  EXPECT_THROW(parse_traffic_matrix(
                   R"({"demands":[{"src":"a","dst":"b","demand":-1}]})"),
               Error);
  EXPECT_THROW(parse_traffic_matrix(
                   R"({"demands":[{"src":"a","dst":"b","demand":1},)"
                   R"({"src":"a","dst":"b","demand":2}]})"),
               Error);
  // unknown node surfaces at demand_set time
  TrafficMatrix bad;
  bad.demands[{"a", "zzz"}] = 1.0;
  EXPECT_THROW(demand_set(t, bad), Error);
}

TEST(Topology, ScaleCapacitiesAndRemoveEdge) {
  Topology t = oracles::load_fixture("triangle.json");
  Topology half = scale_capacities(t, 0.5);
  for (int k = 0; k < t.edge_count(); ++k)
    EXPECT_DOUBLE_EQ(half.edges[k].capacity, t.edges[k].capacity * 0.5);
  EXPECT_THROW(scale_capacities(t, 0.0), Error);
  EXPECT_THROW(scale_capacities(t, 1.5), Error);

  std::string before = serialize_topology(t);
  Topology smaller = remove_edge(t, 1);
  EXPECT_EQ(smaller.edge_count(), t.edge_count() - 1);
  EXPECT_EQ(serialize_topology(t), before);  // base untouched
  EXPECT_THROW(remove_edge(t, 99), Error);
}
