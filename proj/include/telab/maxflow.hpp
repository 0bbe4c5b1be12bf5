#pragma once

// Dinic's algorithm on the unit-capacity directed reduction of an undirected
// graph, plus reconstruction of edge-disjoint paths from the resulting net
// flow.
//
// Each undirected edge is represented by one pair of mutually-reverse arcs of
// capacity 1, so pushing a unit both ways leaves net flow 0 on the edge (the
// two directions counteract). Augmenting paths therefore cannot be read off
// directly; paths are traced from the signed per-edge net flow instead, after
// cancelling any directed cycles left in its support.

#include <cstdint>
#include <queue>
#include <vector>

#include "telab/error.hpp"
#include "telab/topology.hpp"

namespace telab {

struct MaxFlowResult {
  int value = 0;
  // Per undirected edge: f(u,v) - f(v,u) with u < v; always in {-1, 0, 1}.
  std::vector<int> net_flow;
};

// Optional instrumentation: the node sequence of every augmenting path in the
// order Dinic found them (before any cancellation).
struct DinicTrace {
  std::vector<std::vector<int>> augmenting_paths;
};

namespace detail {

// Arcs of the net-flow support digraph, one per edge with nonzero net flow.
struct FlowSupport {
  // out[u] = list of (v, edge) sorted by (v, edge); consumed while tracing
  std::vector<std::vector<std::pair<int, int>>> out;
  int arc_count = 0;

  FlowSupport(const Topology& t, const std::vector<int>& net)
      : out(t.node_count()) {
    for (int k = 0; k < t.edge_count(); ++k) {
      if (net[k] == 0) continue;
      int from = net[k] > 0 ? t.edges[k].u : t.edges[k].v;
      int to = net[k] > 0 ? t.edges[k].v : t.edges[k].u;
      out[from].push_back({to, k});
      ++arc_count;
    }
    for (auto& lst : out) std::sort(lst.begin(), lst.end());
  }
};

// Zeroes the net flow along every directed cycle in the support, leaving an
// acyclic flow with identical value and terminal balance.
inline void cancel_cycles(const Topology& t, std::vector<int>& net) {
  int n = t.node_count();
  // adjacency over current support, rebuilt after each removal (desk scale)
  while (true) {
    FlowSupport sup(t, net);
    // iterative DFS trying to close a directed cycle
    std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
    std::vector<int> stack_nodes;
    std::vector<size_t> stack_iter;
    std::vector<int> stack_edge;  // edge taken into stack_nodes[i]
    bool removed = false;
    for (int root = 0; root < n && !removed; ++root) {
      if (state[root] != 0) continue;
      stack_nodes.assign(1, root);
      stack_iter.assign(1, 0);
      stack_edge.assign(1, -1);
      state[root] = 1;
      while (!stack_nodes.empty() && !removed) {
        int u = stack_nodes.back();
        if (stack_iter.back() >= sup.out[u].size()) {
          state[u] = 2;
          stack_nodes.pop_back();
          stack_iter.pop_back();
          stack_edge.pop_back();
          continue;
        }
        auto [v, k] = sup.out[u][stack_iter.back()++];
        if (state[v] == 1) {
          // cycle: zero edges from v's position on the stack through k
          size_t i = stack_nodes.size() - 1;
          while (stack_nodes[i] != v) {
            net[stack_edge[i]] = 0;
            --i;
          }
          net[k] = 0;
          removed = true;
        } else if (state[v] == 0) {
          state[v] = 1;
          stack_nodes.push_back(v);
          stack_iter.push_back(0);
          stack_edge.push_back(k);
        }
      }
    }
    if (!removed) return;
  }
}

}  // namespace detail

inline MaxFlowResult dinic_max_flow(const UnitDigraph& g, const Topology& t,
                                    int s, int sink, DinicTrace* trace = nullptr) {
  if (s == sink) throw Error(ErrorKind::precondition, "source equals sink");
  if (s < 0 || s >= g.node_count || sink < 0 || sink >= g.node_count)
    throw Error(ErrorKind::unknown_name, "max-flow endpoint out of range");

  int m2 = static_cast<int>(g.arcs.size());
  std::vector<int> flow(m2, 0);  // flow[a] == -flow[a^1]
  auto residual = [&](int a) { return 1 - flow[a]; };

  std::vector<int> level(g.node_count);
  std::vector<size_t> it(g.node_count);
  int value = 0;

  while (true) {
    // BFS level graph over residual arcs
    std::fill(level.begin(), level.end(), -1);
    std::queue<int> q;
    q.push(s);
    level[s] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int a : g.out[u]) {
        int v = g.arcs[a].to;
        if (residual(a) > 0 && level[v] < 0) {
          level[v] = level[u] + 1;
          q.push(v);
        }
      }
    }
    if (level[sink] < 0) break;

    // blocking flow via iterative DFS with current-arc pointers
    std::fill(it.begin(), it.end(), 0);
    while (true) {
      std::vector<int> path_arcs;
      std::vector<int> path_nodes{s};
      int u = s;
      while (u != sink) {
        bool advanced = false;
        while (it[u] < g.out[u].size()) {
          int a = g.out[u][it[u]];
          int v = g.arcs[a].to;
          if (residual(a) > 0 && level[v] == level[u] + 1) {
            path_arcs.push_back(a);
            path_nodes.push_back(v);
            u = v;
            advanced = true;
            break;
          }
          ++it[u];
        }
        if (!advanced) {
          if (u == s) break;  // blocking flow complete
          level[u] = -1;      // dead end; prune and backtrack
          path_arcs.pop_back();
          path_nodes.pop_back();
          u = path_nodes.back();
        }
      }
      if (u != sink) break;
      for (int a : path_arcs) {
        flow[a] += 1;
        flow[a ^ 1] -= 1;
      }
      if (trace) trace->augmenting_paths.push_back(path_nodes);
      ++value;
    }
  }

  MaxFlowResult r;
  r.value = value;
  r.net_flow.resize(t.edge_count());
  for (int k = 0; k < t.edge_count(); ++k) r.net_flow[k] = flow[2 * k];
  detail::cancel_cycles(t, r.net_flow);
  return r;
}

// Decomposes the net flow into exactly r.value node sequences from s to sink.
// Arcs are consumed in (destination node, edge) order, which fixes the
// decomposition deterministically. Throws on a flow that does not conserve.
inline std::vector<std::vector<int>> decompose_flow(const Topology& t,
                                                    const MaxFlowResult& r,
                                                    int s, int sink) {
  if (static_cast<int>(r.net_flow.size()) != t.edge_count())
    throw Error(ErrorKind::internal, "flow matrix does not match topology");
  std::vector<int> net = r.net_flow;
  detail::cancel_cycles(t, net);

  std::vector<int> balance(t.node_count(), 0);
  for (int k = 0; k < t.edge_count(); ++k) {
    if (net[k] == 0) continue;
    if (net[k] != 1 && net[k] != -1)
      throw Error(ErrorKind::internal, "net flow exceeds unit capacity");
    int from = net[k] > 0 ? t.edges[k].u : t.edges[k].v;
    int to = net[k] > 0 ? t.edges[k].v : t.edges[k].u;
    ++balance[from];
    --balance[to];
  }
  for (int v = 0; v < t.node_count(); ++v) {
    int expect = v == s ? r.value : (v == sink ? -r.value : 0);
    if (balance[v] != expect)
      throw Error(ErrorKind::internal,
                  "flow conservation violated at node '" + t.nodes[v] + "'");
  }

  detail::FlowSupport sup(t, net);
  std::vector<size_t> next(t.node_count(), 0);
  std::vector<std::vector<int>> paths;
  for (int i = 0; i < r.value; ++i) {
    std::vector<int> nodes{s};
    int u = s;
    while (u != sink) {
      if (next[u] >= sup.out[u].size())
        throw Error(ErrorKind::internal, "flow trace stuck mid-path");
      auto [v, k] = sup.out[u][next[u]++];
      (void)k;
      nodes.push_back(v);
      u = v;
    }
    paths.push_back(std::move(nodes));
  }
  for (int u = 0; u < t.node_count(); ++u)
    if (next[u] != sup.out[u].size())
      throw Error(ErrorKind::internal, "flow decomposition left unused arcs");
  return paths;
}

}  // namespace telab
