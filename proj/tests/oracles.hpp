#pragma once

// Independent brute-force oracles the tests compare the library against.
// Everything here is deliberately naive: exhaustive enumeration over cuts,
// simple paths, polytope vertices, or binary assignments.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "telab/lp.hpp"
#include "telab/select.hpp"
#include "telab/topology.hpp"

namespace oracles {

// Minimum s-t edge cut by enumerating every node bipartition with s on one
// side and t on the other. Exponential in n-2; fine for n <= ~12.
int min_st_edge_cut(const telab::Topology& t, int s, int d);

// Every simple s-t path (node sequences), in DFS order.
std::vector<std::vector<int>> all_simple_paths(const telab::Topology& t, int s,
                                               int d);

// Cheapest pair of edge-disjoint simple s-t paths, by total weight;
// nullopt when no such pair exists.
std::optional<double> best_disjoint_pair_total(const telab::Topology& t, int s,
                                               int d);

// LP optimum via vertex enumeration. Requires finite bounds on every
// variable (the feasible region is then a polytope, so an optimum, when one
// exists, sits on a vertex). Returns nullopt when infeasible.
std::optional<double> lp_vertex_optimum(const telab::LinearProgram& p);

// Pure-binary ILP optimum by exhaustive enumeration over all assignments.
// Every variable must be binary. Returns nullopt when infeasible.
std::optional<double> ilp_exhaustive_optimum(const telab::LinearProgram& p);

// Exhaustive two-step selection oracle: best max-min per-pair path count F
// under entry limits, then max total count with that floor. Indicator count
// must stay small (2^total enumerated).
struct SelectionOptimum {
  int F = 0;
  int total = 0;
};
SelectionOptimum selection_exhaustive(const telab::Topology& t,
                                      const telab::PathSet& ps,
                                      const telab::FlowEntryLimits& lim);

// Seeded Erdos-Renyi-style connected graph (rejection sampling), unit
// capacities and weights.
telab::Topology random_connected_graph(int n, double edge_prob,
                                       std::uint64_t seed);

// Reads a bundled fixture by file name from the data directory.
std::string data_path(const std::string& name);
telab::Topology load_fixture(const std::string& name);

}  // namespace oracles
