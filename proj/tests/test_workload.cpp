#include "telab/workload.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace telab;

TEST(Workload, DegreeProportionalOnRegularGraphIsUniform) {
  Topology t = oracles::load_fixture("k4.json");  // 3-regular
  GravityConfig cfg;
  cfg.total_demand = 12.0;
  cfg.scheme = WeightScheme::degree_proportional;
  TrafficMatrix tm = gravity_tm(t, cfg);
  EXPECT_EQ(tm.demands.size(), 12u);
  for (const auto& [pair, v] : tm.demands) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Workload, DegreeProportionalWeighsHubs) {
  Topology t = oracles::load_fixture("path3.json");  // degrees 1, 2, 1
  GravityConfig cfg;
  cfg.total_demand = 10.0;
  cfg.scheme = WeightScheme::degree_proportional;
  TrafficMatrix tm = gravity_tm(t, cfg);
  // denom = (1+2+1)^2 - (1+4+1) = 10
  EXPECT_NEAR((tm.demands[{"a", "b"}]), 2.0, 1e-12);
  EXPECT_NEAR((tm.demands[{"a", "c"}]), 1.0, 1e-12);
  EXPECT_NEAR((tm.demands[{"b", "c"}]), 2.0, 1e-12);
  EXPECT_NEAR(tm.total(), 10.0, 1e-9);
}

TEST(Workload, TotalsAndSymmetryHold) {
  Topology t = oracles::load_fixture("wan12.json");
  for (std::uint64_t seed : {0ull, 1ull, 42ull}) {
    GravityConfig cfg;
    cfg.total_demand = 7.5;
    cfg.seed = seed;
    TrafficMatrix tm = gravity_tm(t, cfg);
    EXPECT_NEAR(tm.total(), 7.5, 1e-9) << "seed " << seed;
    EXPECT_EQ(tm.demands.size(), 132u);  // 12 * 11 ordered pairs
    for (const auto& [pair, v] : tm.demands) {
      EXPECT_GT(v, 0.0);
      auto rev = tm.demands.find({pair.second, pair.first});
      ASSERT_NE(rev, tm.demands.end());
      EXPECT_NEAR(rev->second, v, 1e-12);  // product form is symmetric
    }
  }
}

TEST(Workload, SeededDrawsAreReproducibleAndDistinct) {
  Topology t = oracles::load_fixture("wan12.json");
  GravityConfig cfg;
  cfg.total_demand = 3.0;
  cfg.seed = 5;
  TrafficMatrix a = gravity_tm(t, cfg);
  TrafficMatrix b = gravity_tm(t, cfg);
  EXPECT_EQ(serialize_traffic_matrix(a), serialize_traffic_matrix(b));

  cfg.seed = 6;
  TrafficMatrix c = gravity_tm(t, cfg);
  EXPECT_NE(serialize_traffic_matrix(a), serialize_traffic_matrix(c));
}

TEST(Workload, SchemeNamesRoundTrip) {
  EXPECT_EQ(weight_scheme_from_string("uniform-random"),
            WeightScheme::uniform_random);
  EXPECT_EQ(weight_scheme_from_string("degree-proportional"),
            WeightScheme::degree_proportional);
  EXPECT_THROW(weight_scheme_from_string("zipf"), Error);
  EXPECT_STREQ(weight_scheme_name(WeightScheme::uniform_random),
               "uniform-random");
}

TEST(Workload, RejectsDegenerateInputs) {
  std::vector<std::string> one{"solo"};
  Topology t1 = make_topology("solo", one, {});
  GravityConfig cfg;
  EXPECT_THROW(gravity_tm(t1, cfg), Error);

  Topology tri = oracles::load_fixture("triangle.json");
  cfg.total_demand = 0.0;
  EXPECT_THROW(gravity_tm(tri, cfg), Error);
  cfg.total_demand = -1.0;
  EXPECT_THROW(gravity_tm(tri, cfg), Error);
}
