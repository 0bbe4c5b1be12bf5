#pragma once

// Gravity-model traffic matrices: d(s,t) = total * w_s * w_t / sum_{i!=j} w_i w_j.
// Masses come either from a seeded unit-rate exponential draw (via inverse CDF
// on mt19937_64 output, so results are identical across platforms) or from
// node degrees.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "telab/error.hpp"
#include "telab/topology.hpp"

namespace telab {

enum class WeightScheme { uniform_random, degree_proportional };

inline WeightScheme weight_scheme_from_string(const std::string& s) {
  if (s == "uniform-random") return WeightScheme::uniform_random;
  if (s == "degree-proportional") return WeightScheme::degree_proportional;
  throw Error(ErrorKind::unknown_name, "unknown weight scheme '" + s + "'");
}

inline const char* weight_scheme_name(WeightScheme w) {
  return w == WeightScheme::uniform_random ? "uniform-random"
                                           : "degree-proportional";
}

struct GravityConfig {
  double total_demand = 1.0;
  std::uint64_t seed = 0;
  WeightScheme scheme = WeightScheme::uniform_random;
};

inline TrafficMatrix gravity_tm(const Topology& t, const GravityConfig& cfg) {
  if (t.node_count() < 2)
    throw Error(ErrorKind::precondition, "gravity model needs at least 2 nodes");
  if (!(cfg.total_demand > 0.0) || !std::isfinite(cfg.total_demand))
    throw Error(ErrorKind::validation, "total demand must be positive and finite");

  int n = t.node_count();
  std::vector<double> w(n, 0.0);
  if (cfg.scheme == WeightScheme::degree_proportional) {
    for (const Edge& e : t.edges) {
      w[e.u] += 1.0;
      w[e.v] += 1.0;
    }
  } else {
    // unit-rate exponential via inverse CDF; avoids distribution-object
    // implementation differences across standard libraries
    std::mt19937_64 rng(cfg.seed);
    for (int i = 0; i < n; ++i) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
      w[i] = std::max(-std::log1p(-u), 1e-12);
    }
  }

  double denom = 0.0;
  for (int s = 0; s < n; ++s)
    for (int d = 0; d < n; ++d)
      if (s != d) denom += w[s] * w[d];
  if (denom <= 0.0)
    throw Error(ErrorKind::validation,
                "gravity masses all zero (isolated nodes under degree scheme)");

  TrafficMatrix tm;
  for (int s = 0; s < n; ++s)
    for (int d = 0; d < n; ++d)
      if (s != d) {
        double v = cfg.total_demand * w[s] * w[d] / denom;
        if (v > 0.0) tm.demands[{t.nodes[s], t.nodes[d]}] = v;
      }
  return tm;
}

}  // namespace telab
