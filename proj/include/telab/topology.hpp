#pragma once

// Topology and traffic-matrix data model: JSON (canonical) and GraphML
// (best-effort) readers, invariant validation, and the undirected-to-directed
// unit-capacity reduction used by the max-flow path computation.
//
// All types here are plain immutable-after-construction values; they can be
// shared freely across threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "telab/error.hpp"

namespace telab {

using Json = nlohmann::ordered_json;

struct Edge {
  int u = -1;  // node index, always < v
  int v = -1;
  double capacity = 0.0;
  double weight = 1.0;
};

struct Topology {
  std::string name;
  std::vector<std::string> nodes;  // order preserved from the input file
  std::vector<Edge> edges;         // endpoints normalized so u < v

  int node_count() const { return static_cast<int>(nodes.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }

  // Index of a named node, or an unknown-name error.
  int index_of(const std::string& id) const {
    for (int i = 0; i < node_count(); ++i)
      if (nodes[i] == id) return i;
    throw Error(ErrorKind::unknown_name, "unknown node '" + id + "'");
  }

  std::optional<int> find_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    for (int k = 0; k < edge_count(); ++k)
      if (edges[k].u == a && edges[k].v == b) return k;
    return std::nullopt;
  }
};

// Per-node incident (neighbor, edge index) lists, sorted by neighbor index.
struct Adjacency {
  std::vector<std::vector<std::pair<int, int>>> at;

  explicit Adjacency(const Topology& t) : at(t.node_count()) {
    for (int k = 0; k < t.edge_count(); ++k) {
      at[t.edges[k].u].push_back({t.edges[k].v, k});
      at[t.edges[k].v].push_back({t.edges[k].u, k});
    }
    for (auto& lst : at) std::sort(lst.begin(), lst.end());
  }
};

struct Validation {
  std::vector<std::string> violations;  // empty == valid
  std::vector<std::string> advisories;  // legal but worth surfacing

  bool ok() const { return violations.empty(); }
};

inline Validation validate(const Topology& t) {
  Validation out;
  std::map<std::string, int> seen;
  for (int i = 0; i < t.node_count(); ++i) {
    if (++seen[t.nodes[i]] == 2)
      out.violations.push_back("duplicate node '" + t.nodes[i] + "'");
  }
  std::map<std::pair<int, int>, int> pair_count;
  std::vector<int> degree(t.node_count(), 0);
  for (int k = 0; k < t.edge_count(); ++k) {
    const Edge& e = t.edges[k];
    std::string where = "edge #" + std::to_string(k);
    if (e.u < 0 || e.u >= t.node_count() || e.v < 0 || e.v >= t.node_count()) {
      out.violations.push_back(where + ": endpoint not a declared node");
      continue;
    }
    where += " (" + t.nodes[e.u] + "-" + t.nodes[e.v] + ")";
    if (e.u == e.v) out.violations.push_back(where + ": self-loop");
    if (e.u != e.v && ++pair_count[{std::min(e.u, e.v), std::max(e.u, e.v)}] == 2)
      out.violations.push_back(where + ": duplicate edge");
    if (!(e.capacity > 0.0) || !std::isfinite(e.capacity))
      out.violations.push_back(where + ": capacity must be positive");
    if (e.weight < 0.0 || !std::isfinite(e.weight))
      out.violations.push_back(where + ": weight must be nonnegative");
    if (e.u != e.v) {
      ++degree[e.u];
      ++degree[e.v];
    }
  }
  for (int i = 0; i < t.node_count(); ++i)
    if (degree[i] == 0)
      out.advisories.push_back("node '" + t.nodes[i] + "' is isolated");
  return out;
}

namespace detail {

inline double require_number(const Json& j, const char* what) {
  if (!j.is_number())
    throw Error(ErrorKind::parse, std::string(what) + " must be a number");
  return j.get<double>();
}

}  // namespace detail

// Builds a Topology from already-resolved parts, normalizing edge endpoint
// order, and throws on the first invariant violation.
inline Topology make_topology(std::string name, std::vector<std::string> nodes,
                              std::vector<Edge> edges) {
  Topology t;
  t.name = std::move(name);
  t.nodes = std::move(nodes);
  t.edges = std::move(edges);
  for (Edge& e : t.edges)
    if (e.u > e.v) std::swap(e.u, e.v);
  Validation v = validate(t);
  if (!v.ok()) throw Error(ErrorKind::validation, v.violations.front());
  return t;
}

inline Topology parse_topology(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("topology JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("nodes") || !j.contains("edges"))
    throw Error(ErrorKind::parse, "topology JSON: expected {name?, nodes, edges}");

  std::vector<std::string> nodes;
  std::unordered_map<std::string, int> index;
  for (const Json& n : j.at("nodes")) {
    if (!n.is_string())
      throw Error(ErrorKind::parse, "topology JSON: node ids must be strings");
    std::string id = n.get<std::string>();
    if (index.count(id))
      throw Error(ErrorKind::validation, "duplicate node '" + id + "'");
    index[id] = static_cast<int>(nodes.size());
    nodes.push_back(std::move(id));
  }

  std::vector<Edge> edges;
  for (const Json& je : j.at("edges")) {
    if (!je.is_object() || !je.contains("u") || !je.contains("v") ||
        !je.contains("capacity"))
      throw Error(ErrorKind::parse, "topology JSON: edge needs u, v, capacity");
    Edge e;
    std::string u = je.at("u").get<std::string>();
    std::string v = je.at("v").get<std::string>();
    auto iu = index.find(u), iv = index.find(v);
    if (iu == index.end())
      throw Error(ErrorKind::validation, "edge endpoint '" + u + "' not a declared node");
    if (iv == index.end())
      throw Error(ErrorKind::validation, "edge endpoint '" + v + "' not a declared node");
    e.u = iu->second;
    e.v = iv->second;
    e.capacity = detail::require_number(je.at("capacity"), "edge capacity");
    e.weight = je.contains("weight")
                   ? detail::require_number(je.at("weight"), "edge weight")
                   : 1.0;
    edges.push_back(e);
  }
  return make_topology(j.value("name", std::string()), std::move(nodes),
                       std::move(edges));
}

inline Json topology_to_json(const Topology& t) {
  Json j;
  j["name"] = t.name;
  j["nodes"] = t.nodes;
  Json edges = Json::array();
  for (const Edge& e : t.edges) {
    Json je;
    je["u"] = t.nodes[e.u];
    je["v"] = t.nodes[e.v];
    je["capacity"] = e.capacity;
    je["weight"] = e.weight;
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  return j;
}

inline std::string serialize_topology(const Topology& t) {
  return topology_to_json(t).dump(2) + "\n";
}

// --------------------------------------------------------------------------
// GraphML import. A best-effort subset reader: node ids, edge endpoints, and
// an optional edge attribute named "capacity" (default 1.0). Anything the
// subset does not cover is ignored; structural violations still reject.
// --------------------------------------------------------------------------

namespace detail {

inline std::optional<std::string> xml_attr(const std::string& tag,
                                           const std::string& name) {
  size_t pos = 0;
  while ((pos = tag.find(name + "=", pos)) != std::string::npos) {
    // require attribute-name boundary
    if (pos > 0 && (std::isalnum(static_cast<unsigned char>(tag[pos - 1])) ||
                    tag[pos - 1] == '.' || tag[pos - 1] == ':' ||
                    tag[pos - 1] == '_')) {
      pos += name.size();
      continue;
    }
    size_t q = pos + name.size() + 1;
    if (q >= tag.size() || (tag[q] != '"' && tag[q] != '\'')) {
      pos += name.size();
      continue;
    }
    char quote = tag[q];
    size_t end = tag.find(quote, q + 1);
    if (end == std::string::npos) return std::nullopt;
    return tag.substr(q + 1, end - q - 1);
  }
  return std::nullopt;
}

}  // namespace detail

inline Topology import_graphml(const std::string& text) {
  // Resolve which <key> id carries the capacity attribute.
  std::string capacity_key;
  size_t pos = 0;
  while ((pos = text.find("<key", pos)) != std::string::npos) {
    size_t end = text.find('>', pos);
    if (end == std::string::npos) break;
    std::string tag = text.substr(pos, end - pos + 1);
    auto attr = detail::xml_attr(tag, "attr.name");
    auto id = detail::xml_attr(tag, "id");
    if (attr && id) {
      std::string lower = *attr;
      std::transform(lower.begin(), lower.end(), lower.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if (lower == "capacity") capacity_key = *id;
    }
    pos = end + 1;
  }

  std::string name;
  for (size_t g = text.find("<graph"); g != std::string::npos;
       g = text.find("<graph", g + 1)) {
    // skip the enclosing <graphml> element, which shares the prefix
    char next = g + 6 < text.size() ? text[g + 6] : '\0';
    if (next != ' ' && next != '\t' && next != '\n' && next != '>') continue;
    size_t end = text.find('>', g);
    if (end != std::string::npos)
      name = detail::xml_attr(text.substr(g, end - g + 1), "id").value_or("");
    break;
  }

  std::vector<std::string> nodes;
  std::unordered_map<std::string, int> index;
  pos = 0;
  while ((pos = text.find("<node", pos)) != std::string::npos) {
    size_t end = text.find('>', pos);
    if (end == std::string::npos)
      throw Error(ErrorKind::parse, "graphml: unterminated <node> tag");
    auto id = detail::xml_attr(text.substr(pos, end - pos + 1), "id");
    if (!id) throw Error(ErrorKind::parse, "graphml: <node> without id");
    if (!index.count(*id)) {
      index[*id] = static_cast<int>(nodes.size());
      nodes.push_back(*id);
    }
    pos = end + 1;
  }

  std::vector<Edge> edges;
  pos = 0;
  while ((pos = text.find("<edge", pos)) != std::string::npos) {
    size_t tag_end = text.find('>', pos);
    if (tag_end == std::string::npos)
      throw Error(ErrorKind::parse, "graphml: unterminated <edge> tag");
    std::string tag = text.substr(pos, tag_end - pos + 1);
    auto src = detail::xml_attr(tag, "source");
    auto dst = detail::xml_attr(tag, "target");
    if (!src || !dst)
      throw Error(ErrorKind::parse, "graphml: <edge> without source/target");
    auto is_ = index.find(*src);
    auto it_ = index.find(*dst);
    if (is_ == index.end() || it_ == index.end())
      throw Error(ErrorKind::validation,
                  "graphml: edge endpoint not a declared node");
    Edge e;
    e.u = is_->second;
    e.v = it_->second;
    e.capacity = 1.0;

    // Element form: scan <data> children up to </edge> for the capacity key.
    if (tag.back() == '>' && tag[tag.size() - 2] != '/') {
      size_t close = text.find("</edge>", tag_end);
      if (close != std::string::npos && !capacity_key.empty()) {
        std::string body = text.substr(tag_end + 1, close - tag_end - 1);
        size_t d = 0;
        while ((d = body.find("<data", d)) != std::string::npos) {
          size_t dend = body.find('>', d);
          size_t dclose = body.find("</data>", d);
          if (dend == std::string::npos || dclose == std::string::npos) break;
          auto key = detail::xml_attr(body.substr(d, dend - d + 1), "key");
          if (key && *key == capacity_key) {
            try {
              e.capacity = std::stod(body.substr(dend + 1, dclose - dend - 1));
            } catch (...) {
              throw Error(ErrorKind::parse, "graphml: capacity not numeric");
            }
          }
          d = dclose + 7;
        }
        pos = close + 7;
      } else {
        pos = tag_end + 1;
      }
    } else {
      pos = tag_end + 1;
    }
    edges.push_back(e);
  }
  return make_topology(std::move(name), std::move(nodes), std::move(edges));
}

// --------------------------------------------------------------------------
// Unit-capacity directed reduction: two mutually-reverse arcs per undirected
// edge. Arc 2k runs low-index -> high-index endpoint of edge k; arc 2k+1 is
// its reverse. Out-lists are sorted by destination node, then arc id.
// --------------------------------------------------------------------------

struct UnitDigraph {
  struct Arc {
    int from = -1;
    int to = -1;
    int edge = -1;  // undirected edge this arc belongs to
  };
  int node_count = 0;
  std::vector<Arc> arcs;               // size 2m; arc a and a^1 are reverses
  std::vector<std::vector<int>> out;   // arc ids leaving each node
};

inline UnitDigraph to_unit_digraph(const Topology& t) {
  UnitDigraph g;
  g.node_count = t.node_count();
  g.arcs.reserve(2 * t.edges.size());
  g.out.resize(t.node_count());
  for (int k = 0; k < t.edge_count(); ++k) {
    const Edge& e = t.edges[k];
    g.arcs.push_back({e.u, e.v, k});
    g.arcs.push_back({e.v, e.u, k});
    g.out[e.u].push_back(2 * k);
    g.out[e.v].push_back(2 * k + 1);
  }
  for (auto& lst : g.out)
    std::sort(lst.begin(), lst.end(), [&](int a, int b) {
      return std::pair(g.arcs[a].to, a) < std::pair(g.arcs[b].to, b);
    });
  return g;
}

// --------------------------------------------------------------------------
// Traffic matrix
// --------------------------------------------------------------------------

struct TrafficMatrix {
  // ordered (src, dst) name pair -> demand; zero entries permitted on input
  std::map<std::pair<std::string, std::string>, double> demands;

  double total() const {
    double s = 0.0;
    for (const auto& [k, d] : demands) s += d;
    return s;
  }
};

struct Demand {
  int src = -1;
  int dst = -1;
  double value = 0.0;
};

// The demand set: nonzero entries resolved to node indices, sorted by
// (src, dst) index. Unknown names and diagonal/negative entries reject.
inline std::vector<Demand> demand_set(const Topology& t,
                                      const TrafficMatrix& tm) {
  std::vector<Demand> out;
  for (const auto& [pair, value] : tm.demands) {
    int s = t.index_of(pair.first);
    int d = t.index_of(pair.second);
    if (s == d)
      throw Error(ErrorKind::validation,
                  "traffic matrix has diagonal entry '" + pair.first + "'");
    if (value < 0.0 || !std::isfinite(value))
      throw Error(ErrorKind::validation,
                  "demand " + pair.first + "->" + pair.second +
                      " must be finite and nonnegative");
    if (value > 0.0) out.push_back({s, d, value});
  }
  std::sort(out.begin(), out.end(), [](const Demand& a, const Demand& b) {
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  });
  return out;
}

inline TrafficMatrix parse_traffic_matrix(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("traffic matrix JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("demands"))
    throw Error(ErrorKind::parse, "traffic matrix JSON: expected {demands}");
  TrafficMatrix tm;
  for (const Json& jd : j.at("demands")) {
    if (!jd.is_object() || !jd.contains("src") || !jd.contains("dst") ||
        !jd.contains("demand"))
      throw Error(ErrorKind::parse,
                  "traffic matrix JSON: demand needs src, dst, demand");
    std::string s = jd.at("src").get<std::string>();
    std::string d = jd.at("dst").get<std::string>();
    double v = detail::require_number(jd.at("demand"), "demand");
    if (s == d)
      throw Error(ErrorKind::validation,
                  "traffic matrix has diagonal entry '" + s + "'");
    if (v < 0.0 || !std::isfinite(v))
      throw Error(ErrorKind::validation,
                  "demand " + s + "->" + d + " must be finite and nonnegative");
    if (tm.demands.count({s, d}))
      throw Error(ErrorKind::validation,
                  "duplicate demand entry " + s + "->" + d);
    tm.demands[{s, d}] = v;
  }
  return tm;
}

inline Json traffic_matrix_to_json(const TrafficMatrix& tm) {
  Json j;
  Json arr = Json::array();
  for (const auto& [pair, value] : tm.demands) {
    Json jd;
    jd["src"] = pair.first;
    jd["dst"] = pair.second;
    jd["demand"] = value;
    arr.push_back(std::move(jd));
  }
  j["demands"] = std::move(arr);
  return j;
}

inline std::string serialize_traffic_matrix(const TrafficMatrix& tm) {
  return traffic_matrix_to_json(tm).dump(2) + "\n";
}

// Capacity reservation knob: scales every capacity by alpha in (0, 1].
inline Topology scale_capacities(const Topology& t, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0 || !std::isfinite(alpha))
    throw Error(ErrorKind::precondition,
                "capacity multiplier must lie in (0, 1]");
  Topology out = t;
  for (Edge& e : out.edges) e.capacity *= alpha;
  return out;
}

inline Topology remove_edge(const Topology& t, int edge_index) {
  if (edge_index < 0 || edge_index >= t.edge_count())
    throw Error(ErrorKind::precondition, "edge index out of range");
  Topology out = t;
  out.edges.erase(out.edges.begin() + edge_index);
  return out;
}

}  // namespace telab
