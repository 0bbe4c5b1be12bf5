#pragma once

// Phase I path-set computation.
//
// "custom" computes a maximum-cardinality group of edge-disjoint paths per
// ordered pair via the unit-capacity max-flow reduction (see maxflow.hpp).
// The baselines are Suurballe/Bhandari shortest disjoint pairs, Yen k-shortest,
// greedy edge-disjoint k-shortest, equal-cost multi-path, and Valiant load
// balancing through seeded random intermediates.
//
// Every algorithm is deterministic given (input, seed): shortest-path ties are
// broken lexicographically on node identifiers, and path groups are returned
// sorted by (length, lexicographic node sequence).

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "telab/error.hpp"
#include "telab/maxflow.hpp"
#include "telab/topology.hpp"

namespace telab {

struct Path {
  std::vector<int> nodes;  // node indices, source first
  double length = 0.0;     // sum of traversed edge weights
};

// (length, lexicographic-on-node-ids) ordering used everywhere paths are
// sorted or tie-broken.
inline bool path_less(const Topology& t, const Path& a, const Path& b) {
  if (a.length != b.length) return a.length < b.length;
  return std::lexicographical_compare(
      a.nodes.begin(), a.nodes.end(), b.nodes.begin(), b.nodes.end(),
      [&](int x, int y) { return t.nodes[x] < t.nodes[y]; });
}

inline bool nodes_lex_less(const Topology& t, const std::vector<int>& a,
                           const std::vector<int>& b) {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [&](int x, int y) { return t.nodes[x] < t.nodes[y]; });
}

// Builds a Path from a node sequence, checking simplicity and adjacency.
inline Path make_path(const Topology& t, const std::vector<int>& nodes) {
  if (nodes.size() < 2)
    throw Error(ErrorKind::validation, "path needs at least two nodes");
  std::set<int> seen;
  Path p;
  p.nodes = nodes;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] < 0 || nodes[i] >= t.node_count())
      throw Error(ErrorKind::unknown_name, "path references unknown node");
    if (!seen.insert(nodes[i]).second)
      throw Error(ErrorKind::validation, "path repeats node '" +
                                             t.nodes[nodes[i]] + "'");
    if (i > 0) {
      auto k = t.find_edge(nodes[i - 1], nodes[i]);
      if (!k)
        throw Error(ErrorKind::validation,
                    "path uses nonexistent edge " + t.nodes[nodes[i - 1]] +
                        "-" + t.nodes[nodes[i]]);
      p.length += t.edges[*k].weight;
    }
  }
  return p;
}

struct PathGroup {
  int src = -1;
  int dst = -1;
  std::vector<Path> paths;
  // "ok", "disconnected" (no path exists), or "no-disjoint-pair" (suurballe
  // requested on a pair with fewer than two disjoint paths)
  std::string status = "ok";
  int disjoint_capacity = -1;  // max edge-disjoint path count, when computed
};

enum class PathAlgorithm { custom, suurballe, ksp, edksp, ecmp, vlb };

inline PathAlgorithm path_algorithm_from_string(const std::string& s) {
  if (s == "custom") return PathAlgorithm::custom;
  if (s == "suurballe") return PathAlgorithm::suurballe;
  if (s == "ksp") return PathAlgorithm::ksp;
  if (s == "edksp") return PathAlgorithm::edksp;
  if (s == "ecmp") return PathAlgorithm::ecmp;
  if (s == "vlb") return PathAlgorithm::vlb;
  throw Error(ErrorKind::unknown_name, "unknown path algorithm '" + s + "'");
}

inline const char* path_algorithm_name(PathAlgorithm a) {
  switch (a) {
    case PathAlgorithm::custom: return "custom";
    case PathAlgorithm::suurballe: return "suurballe";
    case PathAlgorithm::ksp: return "ksp";
    case PathAlgorithm::edksp: return "edksp";
    case PathAlgorithm::ecmp: return "ecmp";
    case PathAlgorithm::vlb: return "vlb";
  }
  return "?";
}

struct PathParams {
  int k = 4;                 // path budget for ksp / edksp / vlb
  std::uint64_t seed = 0;    // vlb intermediate sampling
  int ecmp_cap = 32;         // bound on equal-cost path enumeration
};

struct PathSet {
  PathAlgorithm algorithm = PathAlgorithm::custom;
  PathParams params;
  std::vector<PathGroup> groups;
};

namespace detail {

// Dijkstra over non-masked edges/nodes with lexicographic tie-breaking on the
// node-id sequence. O(n^2) selection with stored best paths; fine at the
// scale this library targets.
inline std::optional<Path> dijkstra(const Topology& t, const Adjacency& adj,
                                    int src, int dst,
                                    const std::vector<char>* edge_mask = nullptr,
                                    const std::vector<char>* node_mask = nullptr) {
  int n = t.node_count();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<std::vector<int>> best(n);
  std::vector<char> done(n, 0);
  if (node_mask && (*node_mask)[src]) return std::nullopt;
  dist[src] = 0.0;
  best[src] = {src};
  while (true) {
    int u = -1;
    for (int v = 0; v < n; ++v) {
      if (done[v] || dist[v] == inf) continue;
      if (u == -1 || dist[v] < dist[u] ||
          (dist[v] == dist[u] && nodes_lex_less(t, best[v], best[u])))
        u = v;
    }
    if (u == -1) break;
    if (u == dst) {
      Path p;
      p.nodes = best[u];
      p.length = dist[u];
      return p;
    }
    done[u] = 1;
    for (auto [v, k] : adj.at[u]) {
      if (done[v]) continue;
      if (edge_mask && (*edge_mask)[k]) continue;
      if (node_mask && (*node_mask)[v]) continue;
      double nd = dist[u] + t.edges[k].weight;
      std::vector<int> cand = best[u];
      cand.push_back(v);
      if (nd < dist[v] ||
          (nd == dist[v] && nodes_lex_less(t, cand, best[v]))) {
        dist[v] = nd;
        best[v] = std::move(cand);
      }
    }
  }
  return std::nullopt;
}

// Removes every cycle between repeated nodes, leaving a simple sequence.
inline std::vector<int> shortcut(const std::vector<int>& nodes) {
  std::vector<int> out;
  std::map<int, size_t> pos;
  for (int v : nodes) {
    auto it = pos.find(v);
    if (it != pos.end()) {
      while (out.size() > it->second + 1) {
        pos.erase(out.back());
        out.pop_back();
      }
    } else {
      pos[v] = out.size();
      out.push_back(v);
    }
  }
  return out;
}

inline void check_pair(const Topology& t, int s, int dst) {
  if (s < 0 || s >= t.node_count() || dst < 0 || dst >= t.node_count())
    throw Error(ErrorKind::unknown_name, "path endpoint out of range");
  if (s == dst)
    throw Error(ErrorKind::precondition, "source equals destination");
}

inline void sort_group(const Topology& t, PathGroup& g) {
  std::sort(g.paths.begin(), g.paths.end(),
            [&](const Path& a, const Path& b) { return path_less(t, a, b); });
}

}  // namespace detail

// Maximum edge-disjoint path group via the max-flow reduction. |paths| equals
// the min s-t edge cut (Menger).
inline PathGroup custom_paths(const Topology& t, int s, int dst) {
  detail::check_pair(t, s, dst);
  UnitDigraph g = to_unit_digraph(t);
  MaxFlowResult r = dinic_max_flow(g, t, s, dst);
  PathGroup out;
  out.src = s;
  out.dst = dst;
  out.disjoint_capacity = r.value;
  for (const auto& nodes : decompose_flow(t, r, s, dst))
    out.paths.push_back(make_path(t, nodes));
  detail::sort_group(t, out);
  if (out.paths.empty()) out.status = "disconnected";
  return out;
}

// Shortest pair of edge-disjoint paths (Bhandari's formulation of Suurballe):
// take the shortest path, replace its edges by negative reverse arcs, find a
// second shortest path with Bellman-Ford, then cancel opposing traversals and
// decompose the union.
inline PathGroup suurballe_pair(const Topology& t, int s, int dst) {
  detail::check_pair(t, s, dst);
  Adjacency adj(t);
  auto p1 = detail::dijkstra(t, adj, s, dst);
  if (!p1)
    throw Error(ErrorKind::precondition,
                "fewer than 2 edge-disjoint paths exist (pair disconnected)");

  // signed direction of P1 on each edge (+1 means low->high endpoint)
  std::vector<int> dir1(t.edge_count(), 0);
  for (size_t i = 1; i < p1->nodes.size(); ++i) {
    int a = p1->nodes[i - 1], b = p1->nodes[i];
    int k = *t.find_edge(a, b);
    dir1[k] = (a == t.edges[k].u) ? 1 : -1;
  }

  // arcs of the transformed graph, in deterministic order
  struct Arc {
    int from, to, edge;
    double w;
  };
  std::vector<Arc> arcs;
  for (int k = 0; k < t.edge_count(); ++k) {
    const Edge& e = t.edges[k];
    if (dir1[k] == 0) {
      arcs.push_back({e.u, e.v, k, e.weight});
      arcs.push_back({e.v, e.u, k, e.weight});
    } else {
      // drop the arc P1 used; negate its reverse
      int from = dir1[k] > 0 ? e.v : e.u;
      int to = dir1[k] > 0 ? e.u : e.v;
      arcs.push_back({from, to, k, -e.weight});
    }
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return std::tuple(a.from, a.to, a.edge) < std::tuple(b.from, b.to, b.edge);
  });

  // Bellman-Ford (the transformed graph has negative arcs but, with P1
  // shortest, no negative cycle)
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(t.node_count(), inf);
  std::vector<int> via(t.node_count(), -1);  // arc index into arcs
  dist[s] = 0.0;
  for (int round = 1; round < t.node_count(); ++round) {
    bool changed = false;
    for (size_t a = 0; a < arcs.size(); ++a) {
      if (dist[arcs[a].from] == inf) continue;
      double nd = dist[arcs[a].from] + arcs[a].w;
      if (nd < dist[arcs[a].to] - 1e-12) {
        dist[arcs[a].to] = nd;
        via[arcs[a].to] = static_cast<int>(a);
        changed = true;
      }
    }
    if (!changed) break;
  }
  if (dist[dst] == inf)
    throw Error(ErrorKind::precondition, "fewer than 2 edge-disjoint paths exist");

  // walk P2 back, summing signed usage; opposing traversals cancel
  std::vector<int> net = dir1;
  for (int v = dst; v != s;) {
    const Arc& a = arcs[via[v]];
    net[a.edge] += (a.from == t.edges[a.edge].u) ? 1 : -1;
    v = a.from;
  }

  MaxFlowResult two;
  two.value = 2;
  two.net_flow = net;
  PathGroup out;
  out.src = s;
  out.dst = dst;
  out.disjoint_capacity = 2;
  for (const auto& nodes : decompose_flow(t, two, s, dst))
    out.paths.push_back(make_path(t, nodes));
  detail::sort_group(t, out);
  return out;
}

// Yen's k-shortest loopless paths.
inline PathGroup yen_ksp(const Topology& t, int s, int dst, int k) {
  detail::check_pair(t, s, dst);
  if (k < 1) throw Error(ErrorKind::precondition, "k must be positive");
  Adjacency adj(t);
  PathGroup out;
  out.src = s;
  out.dst = dst;

  auto first = detail::dijkstra(t, adj, s, dst);
  if (!first) {
    out.status = "disconnected";
    return out;
  }
  out.paths.push_back(*first);

  auto cand_less = [&](const Path& a, const Path& b) {
    if (a.length != b.length) return a.length < b.length;
    if (nodes_lex_less(t, a.nodes, b.nodes)) return true;
    return false;
  };
  std::set<Path, decltype(cand_less)> candidates(cand_less);
  std::set<std::vector<int>> accepted{first->nodes};

  while (static_cast<int>(out.paths.size()) < k) {
    const Path& prev = out.paths.back();
    for (size_t spur = 0; spur + 1 < prev.nodes.size(); ++spur) {
      std::vector<char> edge_mask(t.edge_count(), 0);
      std::vector<char> node_mask(t.node_count(), 0);
      // deviate at prev.nodes[spur]; ban next edges of paths sharing the root
      for (const Path& p : out.paths) {
        if (p.nodes.size() <= spur + 1) continue;
        if (!std::equal(p.nodes.begin(), p.nodes.begin() + spur + 1,
                        prev.nodes.begin()))
          continue;
        edge_mask[*t.find_edge(p.nodes[spur], p.nodes[spur + 1])] = 1;
      }
      for (size_t i = 0; i < spur; ++i) node_mask[prev.nodes[i]] = 1;

      auto tail = detail::dijkstra(t, adj, prev.nodes[spur], dst, &edge_mask,
                                   &node_mask);
      if (!tail) continue;
      std::vector<int> nodes(prev.nodes.begin(), prev.nodes.begin() + spur);
      nodes.insert(nodes.end(), tail->nodes.begin(), tail->nodes.end());
      if (accepted.count(nodes)) continue;
      candidates.insert(make_path(t, nodes));
    }
    if (candidates.empty()) break;
    out.paths.push_back(*candidates.begin());
    accepted.insert(candidates.begin()->nodes);
    candidates.erase(candidates.begin());
  }
  return out;
}

// Greedy edge-disjoint k-shortest: repeatedly take the shortest path in the
// topology minus the edges of already-chosen paths. Known to under-shoot the
// optimal disjoint pair on trap instances; suurballe_pair covers that case.
inline PathGroup edksp(const Topology& t, int s, int dst, int k) {
  detail::check_pair(t, s, dst);
  if (k < 1) throw Error(ErrorKind::precondition, "k must be positive");
  Adjacency adj(t);
  PathGroup out;
  out.src = s;
  out.dst = dst;
  std::vector<char> used(t.edge_count(), 0);
  for (int i = 0; i < k; ++i) {
    auto p = detail::dijkstra(t, adj, s, dst, &used);
    if (!p) break;
    for (size_t j = 1; j < p->nodes.size(); ++j)
      used[*t.find_edge(p->nodes[j - 1], p->nodes[j])] = 1;
    out.paths.push_back(std::move(*p));
  }
  if (out.paths.empty()) out.status = "disconnected";
  return out;
}

// All minimum-hop paths, enumerated in lexicographic order, capped.
inline PathGroup ecmp_paths(const Topology& t, int s, int dst, int cap = 32) {
  detail::check_pair(t, s, dst);
  if (cap < 1) throw Error(ErrorKind::precondition, "ecmp cap must be positive");
  Adjacency adj(t);
  PathGroup out;
  out.src = s;
  out.dst = dst;

  // BFS hop counts from the destination so DFS can follow hop-decreasing arcs
  std::vector<int> hop(t.node_count(), -1);
  {
    std::vector<int> q{dst};
    hop[dst] = 0;
    for (size_t h = 0; h < q.size(); ++h)
      for (auto [v, k] : adj.at[q[h]])
        if (hop[v] < 0) {
          hop[v] = hop[q[h]] + 1;
          q.push_back(v);
        }
  }
  if (hop[s] < 0) {
    out.status = "disconnected";
    return out;
  }

  // neighbors in node-id order so the enumeration is lexicographic
  std::vector<std::vector<int>> next(t.node_count());
  for (int u = 0; u < t.node_count(); ++u) {
    for (auto [v, k] : adj.at[u])
      if (hop[v] == hop[u] - 1) next[u].push_back(v);
    std::sort(next[u].begin(), next[u].end(),
              [&](int a, int b) { return t.nodes[a] < t.nodes[b]; });
  }

  std::vector<int> walk{s};
  auto dfs = [&](auto&& self, int u) -> bool {
    if (u == dst) {
      out.paths.push_back(make_path(t, walk));
      return static_cast<int>(out.paths.size()) < cap;
    }
    for (int v : next[u]) {
      walk.push_back(v);
      bool more = self(self, v);
      walk.pop_back();
      if (!more) return false;
    }
    return true;
  };
  dfs(dfs, s);
  detail::sort_group(t, out);
  return out;
}

// Valiant load balancing: up to k distinct paths shortest(s,r) ++ shortest(r,dst)
// over intermediates visited in seeded random order. Non-simple concatenations
// are shortcut; a graph with no intermediates falls back to the shortest path.
inline PathGroup vlb_paths(const Topology& t, int s, int dst, int k,
                           std::uint64_t seed) {
  detail::check_pair(t, s, dst);
  if (k < 1) throw Error(ErrorKind::precondition, "k must be positive");
  Adjacency adj(t);
  PathGroup out;
  out.src = s;
  out.dst = dst;

  std::vector<int> mids;
  for (int v = 0; v < t.node_count(); ++v)
    if (v != s && v != dst) mids.push_back(v);

  if (mids.empty()) {
    auto p = detail::dijkstra(t, adj, s, dst);
    if (p)
      out.paths.push_back(std::move(*p));
    else
      out.status = "disconnected";
    return out;
  }

  std::mt19937_64 rng(seed);
  for (size_t i = mids.size(); i > 1; --i)
    std::swap(mids[i - 1], mids[rng() % i]);

  std::set<std::vector<int>> seen;
  for (int r : mids) {
    if (static_cast<int>(out.paths.size()) >= k) break;
    auto head = detail::dijkstra(t, adj, s, r);
    auto tail = detail::dijkstra(t, adj, r, dst);
    if (!head || !tail) continue;
    std::vector<int> nodes = head->nodes;
    nodes.insert(nodes.end(), tail->nodes.begin() + 1, tail->nodes.end());
    nodes = detail::shortcut(nodes);
    if (seen.insert(nodes).second) out.paths.push_back(make_path(t, nodes));
  }
  if (out.paths.empty()) {
    auto p = detail::dijkstra(t, adj, s, dst);
    if (p)
      out.paths.push_back(std::move(*p));
    else
      out.status = "disconnected";
  }
  detail::sort_group(t, out);
  return out;
}

inline PathSet compute_path_set(const Topology& t, PathAlgorithm alg,
                                const std::vector<std::pair<int, int>>& pairs,
                                const PathParams& params = {}) {
  std::set<std::pair<int, int>> distinct;
  for (auto& p : pairs) {
    detail::check_pair(t, p.first, p.second);
    if (!distinct.insert(p).second)
      throw Error(ErrorKind::precondition, "duplicate pair in pair list");
  }
  PathSet ps;
  ps.algorithm = alg;
  ps.params = params;
  for (auto [s, d] : pairs) {
    switch (alg) {
      case PathAlgorithm::custom:
        ps.groups.push_back(custom_paths(t, s, d));
        break;
      case PathAlgorithm::suurballe:
        try {
          ps.groups.push_back(suurballe_pair(t, s, d));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::precondition) throw;
          PathGroup g;
          g.src = s;
          g.dst = d;
          g.status = "no-disjoint-pair";
          ps.groups.push_back(std::move(g));
        }
        break;
      case PathAlgorithm::ksp:
        ps.groups.push_back(yen_ksp(t, s, d, params.k));
        break;
      case PathAlgorithm::edksp:
        ps.groups.push_back(edksp(t, s, d, params.k));
        break;
      case PathAlgorithm::ecmp:
        ps.groups.push_back(ecmp_paths(t, s, d, params.ecmp_cap));
        break;
      case PathAlgorithm::vlb:
        ps.groups.push_back(vlb_paths(t, s, d, params.k, params.seed));
        break;
    }
  }
  return ps;
}

// All ordered pairs in node order, the all-to-all workload shape.
inline std::vector<std::pair<int, int>> all_ordered_pairs(const Topology& t) {
  std::vector<std::pair<int, int>> out;
  for (int s = 0; s < t.node_count(); ++s)
    for (int d = 0; d < t.node_count(); ++d)
      if (s != d) out.push_back({s, d});
  return out;
}

inline Json path_set_to_json(const Topology& t, const PathSet& ps) {
  Json j;
  j["schema"] = "telab/pathset-v1";
  j["algorithm"] = path_algorithm_name(ps.algorithm);
  j["k"] = ps.params.k;
  j["seed"] = ps.params.seed;
  j["ecmp_cap"] = ps.params.ecmp_cap;
  Json groups = Json::array();
  for (const PathGroup& g : ps.groups) {
    Json jg;
    jg["src"] = t.nodes[g.src];
    jg["dst"] = t.nodes[g.dst];
    jg["status"] = g.status;
    if (g.disjoint_capacity >= 0) jg["disjoint_capacity"] = g.disjoint_capacity;
    Json paths = Json::array();
    for (const Path& p : g.paths) {
      Json names = Json::array();
      for (int v : p.nodes) names.push_back(t.nodes[v]);
      paths.push_back(std::move(names));
    }
    jg["paths"] = std::move(paths);
    groups.push_back(std::move(jg));
  }
  j["groups"] = std::move(groups);
  return j;
}

inline PathSet parse_path_set(const Topology& t, const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("path set JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("schema", "") != "telab/pathset-v1")
    throw Error(ErrorKind::parse, "path set JSON: expected schema telab/pathset-v1");
  PathSet ps;
  ps.algorithm = path_algorithm_from_string(j.value("algorithm", "custom"));
  ps.params.k = j.value("k", 4);
  ps.params.seed = j.value("seed", std::uint64_t{0});
  ps.params.ecmp_cap = j.value("ecmp_cap", 32);
  for (const Json& jg : j.at("groups")) {
    PathGroup g;
    g.src = t.index_of(jg.at("src").get<std::string>());
    g.dst = t.index_of(jg.at("dst").get<std::string>());
    g.status = jg.value("status", "ok");
    g.disjoint_capacity = jg.value("disjoint_capacity", -1);
    for (const Json& jp : jg.at("paths")) {
      std::vector<int> nodes;
      for (const Json& jn : jp) nodes.push_back(t.index_of(jn.get<std::string>()));
      g.paths.push_back(make_path(t, nodes));
    }
    ps.groups.push_back(std::move(g));
  }
  return ps;
}

}  // namespace telab
