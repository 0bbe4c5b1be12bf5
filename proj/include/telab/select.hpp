#pragma once

// Phase II: pick paths per pair under per-switch flow-entry limits.
//
// Two methods:
//  - hardnop: find the largest uniform budget K such that keeping the first
//    min(K, X) shortest paths of every pair stays within every node's entry
//    limit. Incremental search: cycle i adds only each pair's i-th path to a
//    running usage vector.
//  - program: two chained 0-1 programs over the path indicators. Step one
//    maximizes the minimum per-pair path count (floor F); step two maximizes
//    the total path count subject to that floor.
//
// A node's entry usage counts every chosen path that touches it, endpoints
// included.

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "telab/error.hpp"
#include "telab/lp.hpp"
#include "telab/paths.hpp"
#include "telab/topology.hpp"

namespace telab {

struct FlowEntryLimits {
  std::vector<int> h;  // per node index

  static FlowEntryLimits uniform(const Topology& t, int limit) {
    if (limit < 0)
      throw Error(ErrorKind::validation, "flow entry limit must be >= 0");
    FlowEntryLimits out;
    out.h.assign(t.node_count(), limit);
    return out;
  }

  void set(const Topology& t, const std::string& node, int limit) {
    if (limit < 0)
      throw Error(ErrorKind::validation, "flow entry limit must be >= 0");
    h.at(t.index_of(node)) = limit;
  }
};

struct SelectionResult {
  std::string mode;                        // "hardnop" or "program"
  std::vector<std::vector<char>> chosen;   // [group][path index]
  std::vector<int> nop;                    // chosen path count per group
  int K = -1;                              // hardnop budget
  int F = -1;                              // program max-min floor
  std::vector<int> usage;                  // entries consumed per node
  std::string status = "ok";               // ok | budget-exceeded
};

inline std::vector<int> entry_usage(const Topology& t,
                                    const std::vector<Path>& paths) {
  std::vector<int> q(t.node_count(), 0);
  for (const Path& p : paths)
    for (int v : p.nodes) {
      if (v < 0 || v >= t.node_count())
        throw Error(ErrorKind::unknown_name, "path references unknown node");
      ++q[v];
    }
  return q;
}

inline std::vector<int> entry_usage(const Topology& t, const PathSet& ps,
                                    const std::vector<std::vector<char>>& chosen) {
  std::vector<Path> flat;
  for (size_t g = 0; g < ps.groups.size(); ++g)
    for (size_t j = 0; j < ps.groups[g].paths.size(); ++j)
      if (chosen[g][j]) flat.push_back(ps.groups[g].paths[j]);
  return entry_usage(t, flat);
}

namespace detail {

inline void check_selection_inputs(const Topology& t, const PathSet& ps,
                                   const FlowEntryLimits& lim) {
  if (static_cast<int>(lim.h.size()) != t.node_count())
    throw Error(ErrorKind::validation, "flow entry limits sized for a different topology");
  for (int v : lim.h)
    if (v < 0) throw Error(ErrorKind::validation, "flow entry limit must be >= 0");
  for (const PathGroup& g : ps.groups)
    for (size_t j = 1; j < g.paths.size(); ++j)
      if (g.paths[j].length < g.paths[j - 1].length - 1e-12)
        throw Error(ErrorKind::precondition,
                    "path group not sorted by length (pair " + t.nodes[g.src] +
                        "->" + t.nodes[g.dst] + ")");
}

}  // namespace detail

// Largest K with the first min(K, X) paths of every pair within limits.
// Incremental: cycle i adds only the i-th path of each group that has one.
inline int hardnop_budget(const Topology& t, const PathSet& ps,
                          const FlowEntryLimits& lim) {
  detail::check_selection_inputs(t, ps, lim);
  std::vector<int> q(t.node_count(), 0);
  int K = 0;
  for (size_t i = 0;; ++i) {
    bool added = false;
    for (const PathGroup& g : ps.groups)
      if (i < g.paths.size()) {
        added = true;
        for (int v : g.paths[i].nodes) ++q[v];
      }
    if (!added) return K;  // every group exhausted: K capped at max X
    for (int v = 0; v < t.node_count(); ++v)
      if (q[v] > lim.h[v]) return K;
    K = static_cast<int>(i) + 1;
  }
}

inline SelectionResult select_hardnop(const Topology& t, const PathSet& ps,
                                      const FlowEntryLimits& lim) {
  int K = hardnop_budget(t, ps, lim);
  bool any_paths = false;
  for (const PathGroup& g : ps.groups) any_paths |= !g.paths.empty();
  if (K == 0 && any_paths)
    throw Error(ErrorKind::infeasible,
                "no-feasible-selection: flow entry limits reject even one path per pair");

  SelectionResult out;
  out.mode = "hardnop";
  out.K = K;
  for (const PathGroup& g : ps.groups) {
    size_t take = std::min<size_t>(K, g.paths.size());
    std::vector<char> c(g.paths.size(), 0);
    std::fill(c.begin(), c.begin() + take, 1);
    out.chosen.push_back(std::move(c));
    out.nop.push_back(static_cast<int>(take));
  }
  out.usage = entry_usage(t, ps, out.chosen);
  return out;
}

// Two-step indicator program. Step 1 maximizes the floor F of per-pair path
// counts; step 2 maximizes the total path count with that floor as a hard
// bound. Pairs with no candidate paths are excluded from the floor (they can
// never receive one).
inline SelectionResult select_program(const Topology& t, const PathSet& ps,
                                      const FlowEntryLimits& lim,
                                      long node_budget = 1000000) {
  detail::check_selection_inputs(t, ps, lim);

  int max_x = 0;
  for (const PathGroup& g : ps.groups)
    max_x = std::max(max_x, static_cast<int>(g.paths.size()));

  auto build = [&](bool with_floor, int floor_value) {
    LinearProgram p;
    std::vector<std::vector<int>> var(ps.groups.size());
    for (size_t g = 0; g < ps.groups.size(); ++g)
      for (size_t j = 0; j < ps.groups[g].paths.size(); ++j)
        var[g].push_back(p.add_binary(
            "a_" + std::to_string(g) + "_" + std::to_string(j),
            with_floor ? 1.0 : 0.0));
    int fvar = -1;
    if (!with_floor) fvar = p.add_variable("F", 0.0, max_x, 1.0);

    // per-node entry capacity
    for (int v = 0; v < t.node_count(); ++v) {
      std::vector<LinearProgram::Term> terms;
      for (size_t g = 0; g < ps.groups.size(); ++g)
        for (size_t j = 0; j < ps.groups[g].paths.size(); ++j) {
          const auto& nodes = ps.groups[g].paths[j].nodes;
          if (std::find(nodes.begin(), nodes.end(), v) != nodes.end())
            terms.push_back({var[g][j], 1.0});
        }
      if (!terms.empty())
        p.add_constraint(terms, '<', static_cast<double>(lim.h[v]));
    }

    // per-pair floor
    for (size_t g = 0; g < ps.groups.size(); ++g) {
      if (ps.groups[g].paths.empty()) continue;
      std::vector<LinearProgram::Term> terms;
      for (int vj : var[g]) terms.push_back({vj, 1.0});
      if (with_floor) {
        p.add_constraint(terms, '>', static_cast<double>(floor_value));
      } else {
        terms.push_back({fvar, -1.0});
        p.add_constraint(terms, '>', 0.0);
      }
    }
    return std::pair(std::move(p), std::move(var));
  };

  SelectionResult out;
  out.mode = "program";

  auto [p1, var1] = build(false, 0);
  LpSolution s1 = solve_binary_ilp(p1, node_budget);
  if (s1.status == LpStatus::budget_exceeded) out.status = "budget-exceeded";
  if (s1.x.empty())
    throw Error(ErrorKind::internal, "path selection program failed: " +
                                         std::string(lp_status_name(s1.status)));
  int F = static_cast<int>(std::floor(s1.value(p1, "F") + 1e-6));
  out.F = F;

  auto [p2, var2] = build(true, F);
  LpSolution s2 = solve_binary_ilp(p2, node_budget);
  if (s2.status == LpStatus::budget_exceeded) out.status = "budget-exceeded";
  if (s2.x.empty())
    throw Error(ErrorKind::internal, "path selection program failed: " +
                                         std::string(lp_status_name(s2.status)));

  for (size_t g = 0; g < ps.groups.size(); ++g) {
    std::vector<char> c(ps.groups[g].paths.size(), 0);
    int count = 0;
    for (size_t j = 0; j < c.size(); ++j)
      if (s2.x[var2[g][j]] > 0.5) {
        c[j] = 1;
        ++count;
      }
    out.chosen.push_back(std::move(c));
    out.nop.push_back(count);
  }
  out.usage = entry_usage(t, ps, out.chosen);
  for (int v = 0; v < t.node_count(); ++v)
    if (out.usage[v] > lim.h[v])
      throw Error(ErrorKind::internal, "selection exceeded entry limits");
  return out;
}

// The selection applied to its path set: per group only the chosen paths.
inline PathSet apply_selection(const PathSet& ps, const SelectionResult& sel) {
  PathSet out;
  out.algorithm = ps.algorithm;
  out.params = ps.params;
  for (size_t g = 0; g < ps.groups.size(); ++g) {
    PathGroup kept;
    kept.src = ps.groups[g].src;
    kept.dst = ps.groups[g].dst;
    kept.status = ps.groups[g].status;
    kept.disjoint_capacity = ps.groups[g].disjoint_capacity;
    for (size_t j = 0; j < ps.groups[g].paths.size(); ++j)
      if (sel.chosen[g][j]) kept.paths.push_back(ps.groups[g].paths[j]);
    out.groups.push_back(std::move(kept));
  }
  return out;
}

inline Json selection_to_json(const Topology& t, const PathSet& ps,
                              const SelectionResult& sel,
                              const FlowEntryLimits& lim) {
  Json j;
  j["schema"] = "telab/selection-v1";
  j["mode"] = sel.mode;
  j["status"] = sel.status;
  if (sel.K >= 0) j["K"] = sel.K;
  if (sel.F >= 0) j["F"] = sel.F;
  Json groups = Json::array();
  for (size_t g = 0; g < ps.groups.size(); ++g) {
    Json jg;
    jg["src"] = t.nodes[ps.groups[g].src];
    jg["dst"] = t.nodes[ps.groups[g].dst];
    jg["nop"] = sel.nop[g];
    Json chosen = Json::array();
    for (char c : sel.chosen[g]) chosen.push_back(c != 0);
    jg["chosen"] = std::move(chosen);
    groups.push_back(std::move(jg));
  }
  j["groups"] = std::move(groups);
  Json usage = Json::object();
  Json limits = Json::object();
  for (int v = 0; v < t.node_count(); ++v) {
    usage[t.nodes[v]] = sel.usage[v];
    limits[t.nodes[v]] = lim.h[v];
  }
  j["usage"] = std::move(usage);
  j["limits"] = std::move(limits);
  return j;
}

}  // namespace telab
