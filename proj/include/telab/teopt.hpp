#pragma once

// Phases III-IV plus the optimal-MCF comparison oracle.
//
// Phase III (min_max_utilization): route every demand fully over its selected
// paths, minimizing the maximum link utilization Z = max_e(load_e / cap_e).
// There is deliberately no capacity cap, so Z may exceed 1.
//
// Phase IV (max_throughput_fair): when Z > 1 the demands cannot all fit, so
// re-allocate to maximize total throughput subject to per-pair fairness
// bounds d/Z <= b <= d and hard link capacities.
//
// optimal_mcf: edge-based multicommodity-flow lower bound on Z, unrestricted
// by path choice. Commodities are aggregated by source node; per-node
// conservation pins the delivery at every destination to its demand, which is
// equivalent to the per-pair formulation by flow decomposition and keeps the
// LP at tractable size.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "telab/error.hpp"
#include "telab/lp.hpp"
#include "telab/paths.hpp"
#include "telab/topology.hpp"

namespace telab {

struct Allocation {
  std::string phase;                    // "III" or "IV"
  double Z = 0.0;                       // max edge utilization
  std::vector<std::vector<double>> b;   // [group][path] bandwidth
  std::vector<double> pair_total;       // per group
  std::vector<double> demand;           // per group (0 for no-demand groups)
  std::vector<std::vector<double>> w;   // per-path weights (normalize_weights)
  std::vector<char> zero_demand;        // per group marker
  std::vector<double> load;             // per edge
  double total_throughput = 0.0;        // sum of pair totals
};

namespace detail {

inline std::map<std::pair<int, int>, double> demand_lookup(
    const Topology& t, const TrafficMatrix& tm) {
  std::map<std::pair<int, int>, double> out;
  for (const Demand& d : demand_set(t, tm)) out[{d.src, d.dst}] = d.value;
  return out;
}

inline std::vector<int> path_edges(const Topology& t, const Path& p) {
  std::vector<int> out;
  for (size_t i = 1; i < p.nodes.size(); ++i)
    out.push_back(*t.find_edge(p.nodes[i - 1], p.nodes[i]));
  return out;
}

inline void fill_loads(const Topology& t, const PathSet& ps, Allocation& a) {
  a.load.assign(t.edge_count(), 0.0);
  for (size_t g = 0; g < ps.groups.size(); ++g)
    for (size_t j = 0; j < ps.groups[g].paths.size(); ++j)
      for (int e : path_edges(t, ps.groups[g].paths[j]))
        a.load[e] += a.b[g][j];
  a.Z = 0.0;
  for (int e = 0; e < t.edge_count(); ++e)
    a.Z = std::max(a.Z, a.load[e] / t.edges[e].capacity);
  a.total_throughput = 0.0;
  for (double v : a.pair_total) a.total_throughput += v;
}

inline Allocation empty_allocation(const Topology& t, const PathSet& ps,
                                   const char* phase) {
  Allocation a;
  a.phase = phase;
  for (const PathGroup& g : ps.groups) {
    a.b.emplace_back(g.paths.size(), 0.0);
    a.pair_total.push_back(0.0);
    a.demand.push_back(0.0);
    a.zero_demand.push_back(1);
  }
  a.load.assign(t.edge_count(), 0.0);
  return a;
}

}  // namespace detail

// Phase III: minimize Z with every demand routed exactly, no capacity cap.
inline Allocation min_max_utilization(const Topology& t, const PathSet& ps,
                                      const TrafficMatrix& tm) {
  auto demands = detail::demand_lookup(t, tm);
  Allocation out = detail::empty_allocation(t, ps, "III");
  for (size_t g = 0; g < ps.groups.size(); ++g) {
    auto it = demands.find({ps.groups[g].src, ps.groups[g].dst});
    if (it == demands.end()) continue;
    out.demand[g] = it->second;
    out.zero_demand[g] = 0;
    if (ps.groups[g].paths.empty())
      throw Error(ErrorKind::infeasible,
                  "unroutable-demand: no selected path for pair " +
                      t.nodes[ps.groups[g].src] + "->" +
                      t.nodes[ps.groups[g].dst]);
    demands.erase(it);
  }
  if (!demands.empty()) {
    auto [s, d] = demands.begin()->first;
    throw Error(ErrorKind::infeasible,
                "unroutable-demand: no selected path for pair " + t.nodes[s] +
                    "->" + t.nodes[d]);
  }

  bool any = false;
  for (size_t g = 0; g < ps.groups.size(); ++g) any |= !out.zero_demand[g];
  if (!any) return out;  // zero traffic matrix

  LinearProgram p;
  p.maximize = false;
  int zvar = p.add_variable("Z", 0.0, kLpInf, 1.0);
  std::vector<std::vector<int>> bvar(ps.groups.size());
  for (size_t g = 0; g < ps.groups.size(); ++g) {
    if (out.zero_demand[g]) continue;
    for (size_t j = 0; j < ps.groups[g].paths.size(); ++j)
      bvar[g].push_back(p.add_variable(
          "b_" + std::to_string(g) + "_" + std::to_string(j), 0.0, kLpInf));
  }
  for (size_t g = 0; g < ps.groups.size(); ++g) {
    if (out.zero_demand[g]) continue;
    std::vector<LinearProgram::Term> terms;
    for (int v : bvar[g]) terms.push_back({v, 1.0});
    p.add_constraint(terms, '=', out.demand[g]);
  }
  // load_e <= Z * cap_e
  std::vector<std::vector<LinearProgram::Term>> edge_terms(t.edge_count());
  for (size_t g = 0; g < ps.groups.size(); ++g) {
    if (out.zero_demand[g]) continue;
    for (size_t j = 0; j < ps.groups[g].paths.size(); ++j)
      for (int e : detail::path_edges(t, ps.groups[g].paths[j]))
        edge_terms[e].push_back({bvar[g][j], 1.0});
  }
  for (int e = 0; e < t.edge_count(); ++e) {
    if (edge_terms[e].empty()) continue;
    auto terms = edge_terms[e];
    terms.push_back({zvar, -t.edges[e].capacity});
    p.add_constraint(terms, '<', 0.0);
  }

  LpSolution s = solve_lp(p);
  if (s.status != LpStatus::optimal)
    throw Error(ErrorKind::internal, "utilization program not optimal: " +
                                         std::string(lp_status_name(s.status)));
  for (size_t g = 0; g < ps.groups.size(); ++g) {
    if (out.zero_demand[g]) continue;
    for (size_t j = 0; j < bvar[g].size(); ++j) out.b[g][j] = s.x[bvar[g][j]];
    out.pair_total[g] = out.demand[g];
  }
  detail::fill_loads(t, ps, out);
  return out;
}

// Phase IV: when Z > 1, maximize total throughput with per-pair bounds
// d/Z <= b_pair <= d and hard capacities.
inline Allocation max_throughput_fair(const Topology& t, const PathSet& ps,
                                      const TrafficMatrix& tm, double Z) {
  if (!(Z > 1.0 + 1e-9))
    throw Error(ErrorKind::precondition,
                "fair re-allocation requires utilization Z > 1");
  auto demands = detail::demand_lookup(t, tm);
  Allocation out = detail::empty_allocation(t, ps, "IV");
  for (size_t g = 0; g < ps.groups.size(); ++g) {
    auto it = demands.find({ps.groups[g].src, ps.groups[g].dst});
    if (it == demands.end()) continue;
    out.demand[g] = it->second;
    out.zero_demand[g] = 0;
    if (ps.groups[g].paths.empty())
      throw Error(ErrorKind::infeasible,
                  "unroutable-demand: no selected path for pair " +
                      t.nodes[ps.groups[g].src] + "->" +
                      t.nodes[ps.groups[g].dst]);
    demands.erase(it);
  }
  if (!demands.empty()) {
    auto [s, d] = demands.begin()->first;
    throw Error(ErrorKind::infeasible,
                "unroutable-demand: no selected path for pair " + t.nodes[s] +
                    "->" + t.nodes[d]);
  }

  LinearProgram p;
  p.maximize = true;
  std::vector<std::vector<int>> bvar(ps.groups.size());
  for (size_t g = 0; g < ps.groups.size(); ++g) {
    if (out.zero_demand[g]) continue;
    for (size_t j = 0; j < ps.groups[g].paths.size(); ++j)
      bvar[g].push_back(p.add_variable(
          "b_" + std::to_string(g) + "_" + std::to_string(j), 0.0, kLpInf,
          1.0));
  }
  for (size_t g = 0; g < ps.groups.size(); ++g) {
    if (out.zero_demand[g]) continue;
    std::vector<LinearProgram::Term> terms;
    for (int v : bvar[g]) terms.push_back({v, 1.0});
    p.add_constraint(terms, '>', out.demand[g] / Z);
    p.add_constraint(terms, '<', out.demand[g]);
  }
  std::vector<std::vector<LinearProgram::Term>> edge_terms(t.edge_count());
  for (size_t g = 0; g < ps.groups.size(); ++g) {
    if (out.zero_demand[g]) continue;
    for (size_t j = 0; j < ps.groups[g].paths.size(); ++j)
      for (int e : detail::path_edges(t, ps.groups[g].paths[j]))
        edge_terms[e].push_back({bvar[g][j], 1.0});
  }
  for (int e = 0; e < t.edge_count(); ++e)
    if (!edge_terms[e].empty())
      p.add_constraint(edge_terms[e], '<', t.edges[e].capacity);

  LpSolution s = solve_lp(p);
  if (s.status == LpStatus::infeasible)
    throw Error(ErrorKind::infeasible,
                "fair re-allocation infeasible: floor demands exceed capacity "
                "(Z below the phase-III optimum?)");
  if (s.status != LpStatus::optimal)
    throw Error(ErrorKind::internal, "throughput program not optimal: " +
                                         std::string(lp_status_name(s.status)));
  for (size_t g = 0; g < ps.groups.size(); ++g) {
    if (out.zero_demand[g]) continue;
    double total = 0.0;
    for (size_t j = 0; j < bvar[g].size(); ++j) {
      out.b[g][j] = s.x[bvar[g][j]];
      total += out.b[g][j];
    }
    out.pair_total[g] = total;
  }
  detail::fill_loads(t, ps, out);
  return out;
}

// Edge-based MCF lower bound on Z, aggregated by source node.
inline double optimal_mcf(const Topology& t, const TrafficMatrix& tm) {
  std::vector<Demand> ds = demand_set(t, tm);
  if (ds.empty()) return 0.0;

  // connectivity precheck names the offending pair
  Adjacency adj(t);
  std::map<int, std::vector<char>> reach;
  for (const Demand& d : ds) {
    auto it = reach.find(d.src);
    if (it == reach.end()) {
      std::vector<char> seen(t.node_count(), 0);
      std::vector<int> q{d.src};
      seen[d.src] = 1;
      for (size_t h = 0; h < q.size(); ++h)
        for (auto [v, k] : adj.at[q[h]])
          if (!seen[v]) {
            seen[v] = 1;
            q.push_back(v);
          }
      it = reach.emplace(d.src, std::move(seen)).first;
    }
    if (!it->second[d.dst])
      throw Error(ErrorKind::infeasible, "disconnected demand pair " +
                                             t.nodes[d.src] + "->" +
                                             t.nodes[d.dst]);
  }

  // per-source supplies: supply[s][v] = -d(s,v), supply[s][s] = sum of demands
  std::map<int, std::vector<double>> supply;
  for (const Demand& d : ds) {
    auto& row = supply.try_emplace(d.src, t.node_count(), 0.0).first->second;
    row[d.src] += d.value;
    row[d.dst] -= d.value;
  }

  LinearProgram p;
  p.maximize = false;
  int zvar = p.add_variable("Z", 0.0, kLpInf, 1.0);
  // f[source][2k] flows u->v on edge k, f[source][2k+1] flows v->u
  std::map<int, std::vector<int>> fvar;
  for (auto& [s, row] : supply) {
    auto& fv = fvar[s];
    for (int k = 0; k < t.edge_count(); ++k) {
      fv.push_back(p.add_variable(
          "f_" + t.nodes[s] + "_" + std::to_string(k) + "_fwd", 0.0, kLpInf));
      fv.push_back(p.add_variable(
          "f_" + t.nodes[s] + "_" + std::to_string(k) + "_rev", 0.0, kLpInf));
    }
  }
  // conservation: out - in = supply, per source and node
  for (auto& [s, row] : supply) {
    auto& fv = fvar[s];
    for (int v = 0; v < t.node_count(); ++v) {
      std::vector<LinearProgram::Term> terms;
      for (int k = 0; k < t.edge_count(); ++k) {
        if (t.edges[k].u == v) {
          terms.push_back({fv[2 * k], 1.0});
          terms.push_back({fv[2 * k + 1], -1.0});
        } else if (t.edges[k].v == v) {
          terms.push_back({fv[2 * k], -1.0});
          terms.push_back({fv[2 * k + 1], 1.0});
        }
      }
      if (terms.empty()) continue;
      p.add_constraint(terms, '=', row[v]);
    }
  }
  // shared undirected capacity: total traffic both ways <= Z * cap
  for (int k = 0; k < t.edge_count(); ++k) {
    std::vector<LinearProgram::Term> terms;
    for (auto& [s, fv] : fvar) {
      terms.push_back({fv[2 * k], 1.0});
      terms.push_back({fv[2 * k + 1], 1.0});
    }
    terms.push_back({zvar, -t.edges[k].capacity});
    p.add_constraint(terms, '<', 0.0);
  }

  LpSolution s = solve_lp(p);
  if (s.status != LpStatus::optimal)
    throw Error(ErrorKind::internal, "mcf program not optimal: " +
                                         std::string(lp_status_name(s.status)));
  return s.x[zvar];
}

// w^p = b^p / b_pair; zero-total pairs get uniform weights and a marker.
inline Allocation normalize_weights(const Allocation& a) {
  Allocation out = a;
  out.w.clear();
  for (size_t g = 0; g < a.b.size(); ++g) {
    std::vector<double> w(a.b[g].size(), 0.0);
    if (a.pair_total[g] > 1e-12) {
      for (size_t j = 0; j < w.size(); ++j) w[j] = a.b[g][j] / a.pair_total[g];
    } else if (!w.empty()) {
      std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
      out.zero_demand[g] = 1;
    }
    out.w.push_back(std::move(w));
  }
  return out;
}

inline Json allocation_to_json(const Topology& t, const PathSet& ps,
                               const Allocation& a) {
  Json j;
  j["schema"] = "telab/allocation-v1";
  j["phase"] = a.phase;
  j["Z"] = a.Z;
  j["total_throughput"] = a.total_throughput;
  Json pairs = Json::array();
  for (size_t g = 0; g < ps.groups.size(); ++g) {
    Json jp;
    jp["src"] = t.nodes[ps.groups[g].src];
    jp["dst"] = t.nodes[ps.groups[g].dst];
    jp["demand"] = a.demand[g];
    jp["total"] = a.pair_total[g];
    jp["zero_demand"] = a.zero_demand[g] != 0;
    Json paths = Json::array();
    for (const Path& p : ps.groups[g].paths) {
      Json names = Json::array();
      for (int v : p.nodes) names.push_back(t.nodes[v]);
      paths.push_back(std::move(names));
    }
    jp["paths"] = std::move(paths);
    jp["b"] = a.b[g];
    if (!a.w.empty()) jp["w"] = a.w[g];
    pairs.push_back(std::move(jp));
  }
  j["pairs"] = std::move(pairs);
  Json edges = Json::array();
  for (int e = 0; e < t.edge_count(); ++e) {
    Json je;
    je["u"] = t.nodes[t.edges[e].u];
    je["v"] = t.nodes[t.edges[e].v];
    je["load"] = a.load[e];
    je["utilization"] = a.load[e] / t.edges[e].capacity;
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  return j;
}

}  // namespace telab
