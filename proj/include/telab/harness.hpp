#pragma once

// End-to-end pipeline, single-link-failure sweeps, metrics, and CSV
// distribution export.
//
// Pipeline wiring: Phase I computes a path set for the demand pairs, Phase II
// selects paths under flow-entry limits, Phase III minimizes the maximum link
// utilization Z, and Phase IV (triggered only when Z > 1) re-allocates for
// maximum throughput under fairness floors. Demand pairs that end up with no
// usable path are dropped with a reason and count as unsatisfied demand.
//
// All outputs are deterministic for a fixed (input, config, seed); wall-clock
// timings live only in the in-memory result, never in exported artifacts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "telab/error.hpp"
#include "telab/paths.hpp"
#include "telab/select.hpp"
#include "telab/teopt.hpp"
#include "telab/topology.hpp"

namespace telab {

struct PipelineConfig {
  PathAlgorithm algorithm = PathAlgorithm::custom;
  PathParams params;
  std::string selection = "hardnop";          // hardnop | program
  std::optional<int> uniform_limit;           // flow entries per node
  std::map<std::string, int> node_limits;     // per-node overrides
  double capacity_scale = 1.0;                // reserve knob, in (0,1]
  long ilp_node_budget = 1000000;
};

struct DroppedPair {
  int src = -1, dst = -1;
  double demand = 0.0;
  std::string reason;
};

struct PipelineResult {
  Topology topo;              // capacity-scaled topology the run used
  PathSet paths;              // phase I output
  SelectionResult selection;  // phase II output
  PathSet selected;           // paths that survived selection
  Allocation allocation;      // final allocation (phase III or IV)
  double z_phase3 = 0.0;      // utilization before any re-allocation
  std::vector<DroppedPair> dropped;
  double total_demand = 0.0;  // includes dropped pairs
  double phase_ms[4] = {0, 0, 0, 0};
};

struct MetricsReport {
  double z_alg = 0.0;  // phase III utilization
  double z_opt = 0.0;  // optimal MCF utilization
  std::optional<double> performance_ratio;  // z_alg/z_opt, when z_opt <= 1
  std::optional<double> throughput_ratio;   // T_alg/(sum d/z_opt), when z_opt > 1
  double total_demand = 0.0;
  double throughput = 0.0;
  double satisfied_fraction = 1.0;  // throughput / total demand
  int dropped_pairs = 0;
  std::vector<double> link_utilization;        // per edge
  std::vector<int> entry_usage;                // per node
  std::vector<int> used_path_count;            // per demand pair
  std::vector<double> mean_used_path_length;   // per pair with >= 1 used path
};

inline FlowEntryLimits pipeline_limits(const Topology& t,
                                       const PipelineConfig& cfg) {
  // "unlimited" is any bound no selection can reach
  int base = cfg.uniform_limit ? *cfg.uniform_limit
                               : std::numeric_limits<int>::max() / 2;
  FlowEntryLimits lim = FlowEntryLimits::uniform(t, base);
  for (const auto& [node, h] : cfg.node_limits) lim.set(t, node, h);
  return lim;
}

inline PipelineResult run_pipeline(const Topology& t, const TrafficMatrix& tm,
                                   const PipelineConfig& cfg) {
  using clock = std::chrono::steady_clock;
  if (cfg.selection != "hardnop" && cfg.selection != "program")
    throw Error(ErrorKind::unknown_name,
                "unknown selection method '" + cfg.selection + "'");

  PipelineResult r;
  r.topo = cfg.capacity_scale == 1.0 ? t : scale_capacities(t, cfg.capacity_scale);

  std::vector<Demand> demands = demand_set(r.topo, tm);
  for (const Demand& d : demands) r.total_demand += d.value;
  std::vector<std::pair<int, int>> pairs;
  for (const Demand& d : demands) pairs.push_back({d.src, d.dst});

  auto t0 = clock::now();
  r.paths = compute_path_set(r.topo, cfg.algorithm, pairs, cfg.params);
  auto t1 = clock::now();
  r.phase_ms[0] = std::chrono::duration<double, std::milli>(t1 - t0).count();

  FlowEntryLimits lim = pipeline_limits(r.topo, cfg);
  r.selection = cfg.selection == "hardnop"
                    ? select_hardnop(r.topo, r.paths, lim)
                    : select_program(r.topo, r.paths, lim, cfg.ilp_node_budget);
  r.selected = apply_selection(r.paths, r.selection);
  auto t2 = clock::now();
  r.phase_ms[1] = std::chrono::duration<double, std::milli>(t2 - t1).count();

  // drop demand pairs with no usable path; they count as unsatisfied
  TrafficMatrix routable;
  for (size_t g = 0; g < r.selected.groups.size(); ++g) {
    const PathGroup& sg = r.selected.groups[g];
    if (sg.paths.empty()) {
      std::string reason =
          r.paths.groups[g].status != "ok" ? r.paths.groups[g].status
                                           : "no-path-selected";
      r.dropped.push_back({sg.src, sg.dst, demands[g].value, reason});
    } else {
      routable.demands[{r.topo.nodes[sg.src], r.topo.nodes[sg.dst]}] =
          demands[g].value;
    }
  }

  Allocation phase3 = min_max_utilization(r.topo, r.selected, routable);
  r.z_phase3 = phase3.Z;
  auto t3 = clock::now();
  r.phase_ms[2] = std::chrono::duration<double, std::milli>(t3 - t2).count();

  if (phase3.Z > 1.0 + 1e-9) {
    r.allocation = normalize_weights(
        max_throughput_fair(r.topo, r.selected, routable, phase3.Z));
  } else {
    r.allocation = normalize_weights(phase3);
  }
  auto t4 = clock::now();
  r.phase_ms[3] = std::chrono::duration<double, std::milli>(t4 - t3).count();
  return r;
}

// One run per edge, on the topology with that edge removed.
inline std::vector<PipelineResult> failure_sweep(const Topology& t,
                                                 const TrafficMatrix& tm,
                                                 const PipelineConfig& cfg) {
  std::vector<PipelineResult> out;
  for (int e = 0; e < t.edge_count(); ++e)
    out.push_back(run_pipeline(remove_edge(t, e), tm, cfg));
  return out;
}

inline MetricsReport compute_metrics(const PipelineResult& r, double zopt) {
  MetricsReport m;
  m.z_alg = r.z_phase3;
  m.z_opt = zopt;
  m.total_demand = r.total_demand;
  m.throughput = r.allocation.total_throughput;
  m.satisfied_fraction =
      m.total_demand > 1e-12 ? m.throughput / m.total_demand : 1.0;
  m.dropped_pairs = static_cast<int>(r.dropped.size());
  if (zopt > 1e-12) {
    if (zopt <= 1.0 + 1e-9)
      m.performance_ratio = m.z_alg / zopt;
    else
      m.throughput_ratio = m.throughput / (m.total_demand / zopt);
  }
  for (int e = 0; e < r.topo.edge_count(); ++e)
    m.link_utilization.push_back(r.allocation.load[e] /
                                 r.topo.edges[e].capacity);
  m.entry_usage = r.selection.usage;
  for (size_t g = 0; g < r.selected.groups.size(); ++g) {
    int used = 0;
    double len = 0.0;
    for (size_t j = 0; j < r.selected.groups[g].paths.size(); ++j)
      if (r.allocation.b[g][j] > 1e-9) {
        ++used;
        len += r.selected.groups[g].paths[j].length;
      }
    m.used_path_count.push_back(used);
    if (used > 0) m.mean_used_path_length.push_back(len / used);
  }
  return m;
}

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Empirical CDF (y = P(X <= x)) or CCDF (y = P(X > x)) at the distinct
// sorted values of the sample.
inline std::string distribution_csv(std::vector<double> values, bool ccdf) {
  std::string out = "x,y\n";
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && values[j] == values[i]) ++j;
    double y = ccdf ? static_cast<double>(n - j) / n
                    : static_cast<double>(j) / n;
    out += format_number(values[i]) + "," + format_number(y) + "\n";
    i = j;
  }
  return out;
}

}  // namespace detail

// Pools the reports' distributions into four CSV files (keyed by filename):
// link-utilization CDF, flow-entry-usage CCDF, used-path-count CCDF, and
// mean-used-path-length CCDF.
inline std::map<std::string, std::string> export_distributions(
    const std::vector<MetricsReport>& reports) {
  if (reports.empty())
    throw Error(ErrorKind::precondition, "no reports to export");
  std::vector<double> util, entries, counts, lengths;
  for (const MetricsReport& m : reports) {
    util.insert(util.end(), m.link_utilization.begin(),
                m.link_utilization.end());
    for (int v : m.entry_usage) entries.push_back(v);
    for (int v : m.used_path_count) counts.push_back(v);
    lengths.insert(lengths.end(), m.mean_used_path_length.begin(),
                   m.mean_used_path_length.end());
  }
  return {
      {"link_utilization_cdf.csv", detail::distribution_csv(util, false)},
      {"entry_usage_ccdf.csv", detail::distribution_csv(entries, true)},
      {"path_count_ccdf.csv", detail::distribution_csv(counts, true)},
      {"path_length_ccdf.csv", detail::distribution_csv(lengths, true)},
  };
}

inline Json metrics_to_json(const MetricsReport& m) {
  Json j;
  j["schema"] = "telab/metrics-v1";
  j["z_alg"] = m.z_alg;
  j["z_opt"] = m.z_opt;
  if (m.performance_ratio) j["performance_ratio"] = *m.performance_ratio;
  if (m.throughput_ratio) j["throughput_ratio"] = *m.throughput_ratio;
  j["total_demand"] = m.total_demand;
  j["throughput"] = m.throughput;
  j["satisfied_fraction"] = m.satisfied_fraction;
  j["dropped_pairs"] = m.dropped_pairs;
  j["link_utilization"] = m.link_utilization;
  j["entry_usage"] = m.entry_usage;
  j["used_path_count"] = m.used_path_count;
  j["mean_used_path_length"] = m.mean_used_path_length;
  return j;
}

inline Json pipeline_config_to_json(const PipelineConfig& cfg) {
  Json j;
  j["algorithm"] = path_algorithm_name(cfg.algorithm);
  j["k"] = cfg.params.k;
  j["seed"] = cfg.params.seed;
  j["ecmp_cap"] = cfg.params.ecmp_cap;
  j["selection"] = cfg.selection;
  if (cfg.uniform_limit) j["flow_entry_limit"] = *cfg.uniform_limit;
  if (!cfg.node_limits.empty()) {
    Json nl = Json::object();
    for (const auto& [node, h] : cfg.node_limits) nl[node] = h;
    j["node_limits"] = std::move(nl);
  }
  j["capacity_scale"] = cfg.capacity_scale;
  j["ilp_node_budget"] = cfg.ilp_node_budget;
  return j;
}

inline Json pipeline_result_to_json(const PipelineResult& r,
                                    const PipelineConfig& cfg) {
  const Topology& t = r.topo;
  Json j;
  j["schema"] = "telab/result-v1";
  j["topology"] = t.name;
  j["config"] = pipeline_config_to_json(cfg);
  j["z_phase3"] = r.z_phase3;
  j["phase"] = r.allocation.phase;
  j["total_demand"] = r.total_demand;
  j["throughput"] = r.allocation.total_throughput;
  Json dropped = Json::array();
  for (const DroppedPair& d : r.dropped) {
    Json jd;
    jd["src"] = t.nodes[d.src];
    jd["dst"] = t.nodes[d.dst];
    jd["demand"] = d.demand;
    jd["reason"] = d.reason;
    dropped.push_back(std::move(jd));
  }
  j["dropped"] = std::move(dropped);
  j["paths"] = path_set_to_json(t, r.paths);
  FlowEntryLimits lim = pipeline_limits(t, cfg);
  j["selection"] = selection_to_json(t, r.paths, r.selection, lim);
  j["allocation"] = allocation_to_json(t, r.selected, r.allocation);
  return j;
}

}  // namespace telab
