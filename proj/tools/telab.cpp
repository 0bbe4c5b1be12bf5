// telab: reproducible traffic-engineering experiments.
//
// Subcommands: paths, select, te, mcf, tmgen, run, sweep, export.
// Every command reads inputs from flags/files and writes only its declared
// outputs; reruns with identical inputs produce byte-identical files.
//
// Exit codes: 0 success, 2 usage, 3 I/O, 4 parse/schema, 5 semantic
// (validation, precondition, unknown name, infeasible), 6 internal.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "telab/telab.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

bool log_enabled() {
  const char* v = std::getenv("TELAB_LOG");
  return v && *v && std::string(v) != "0" && std::string(v) != "off";
}

void log_line(const std::string& msg) {
  if (log_enabled()) std::cerr << "[telab] " << msg << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw telab::Error(telab::ErrorKind::io, "cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw telab::Error(telab::ErrorKind::io, "cannot write file '" + path + "'");
  out << content;
  if (!out)
    throw telab::Error(telab::ErrorKind::io, "write failed for '" + path + "'");
}

void write_json(const std::string& path, const telab::Json& j) {
  write_file(path, j.dump(2) + "\n");
}

telab::Topology load_topology(const std::string& path) {
  std::string text = read_file(path);
  auto ends_with = [&](const char* suffix) {
    std::string s(suffix);
    return path.size() >= s.size() &&
           path.compare(path.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with(".graphml") || ends_with(".xml"))
    return telab::import_graphml(text);
  return telab::parse_topology(text);
}

telab::TrafficMatrix load_tm(const std::string& path) {
  return telab::parse_traffic_matrix(read_file(path));
}

std::vector<std::pair<int, int>> parse_pairs(const telab::Topology& t,
                                             const std::string& spec) {
  if (spec == "all") return telab::all_ordered_pairs(t);
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == item.size())
      throw telab::Error(telab::ErrorKind::validation,
                         "pair list entries must look like src:dst");
    out.push_back({t.index_of(item.substr(0, colon)),
                   t.index_of(item.substr(colon + 1))});
  }
  if (out.empty())
    throw telab::Error(telab::ErrorKind::validation, "empty pair list");
  return out;
}

telab::WeightScheme parse_scheme(const std::string& s) {
  if (s == "uniform" || s == "uniform-random")
    return telab::WeightScheme::uniform_random;
  if (s == "degree" || s == "degree-proportional")
    return telab::WeightScheme::degree_proportional;
  throw telab::Error(telab::ErrorKind::unknown_name,
                     "unknown weight scheme '" + s + "'");
}

void apply_node_limits(const std::vector<std::string>& raw,
                       telab::PipelineConfig& cfg) {
  for (const std::string& item : raw) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw telab::Error(telab::ErrorKind::validation,
                         "node limits must look like node=limit");
    cfg.node_limits[item.substr(0, eq)] = std::stoi(item.substr(eq + 1));
  }
}

telab::MetricsReport metrics_from_result_json(const telab::Topology& t,
                                              const telab::Json& j) {
  // reconstructs only the distribution fields export needs
  telab::MetricsReport m;
  m.z_alg = j.value("z_phase3", 0.0);
  m.total_demand = j.value("total_demand", 0.0);
  m.throughput = j.value("throughput", 0.0);
  m.satisfied_fraction =
      m.total_demand > 1e-12 ? m.throughput / m.total_demand : 1.0;
  m.dropped_pairs = static_cast<int>(j.at("dropped").size());
  for (const telab::Json& je : j.at("allocation").at("edges"))
    m.link_utilization.push_back(je.at("utilization").get<double>());
  for (const auto& [node, q] : j.at("selection").at("usage").items())
    m.entry_usage.push_back(q.get<int>());
  for (const telab::Json& jp : j.at("allocation").at("pairs")) {
    const auto& b = jp.at("b");
    const auto& paths = jp.at("paths");
    int used = 0;
    double len = 0.0;
    for (size_t i = 0; i < b.size(); ++i) {
      if (b[i].get<double>() <= 1e-9) continue;
      ++used;
      std::vector<int> nodes;
      for (const telab::Json& jn : paths[i])
        nodes.push_back(t.index_of(jn.get<std::string>()));
      len += telab::make_path(t, nodes).length;
    }
    m.used_path_count.push_back(used);
    if (used > 0) m.mean_used_path_length.push_back(len / used);
  }
  return m;
}

telab::Json manifest_json(const std::string& command,
                          const telab::PipelineConfig& cfg,
                          const std::string& topo_name, size_t runs) {
  telab::Json j;
  j["schema"] = "telab/manifest-v1";
  j["tool"] = "telab";
  j["version"] = kVersion;
  j["command"] = command;
  j["topology"] = topo_name;
  j["runs"] = runs;
  j["config"] = telab::pipeline_config_to_json(cfg);
  return j;
}

void log_phases(const telab::PipelineResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "phases ms: paths=%.1f select=%.1f utilization=%.1f fair=%.1f",
                r.phase_ms[0], r.phase_ms[1], r.phase_ms[2], r.phase_ms[3]);
  log_line(buf);
}

struct RunFlags {
  std::string topo, tm, out, metrics_out;
  std::string alg = "custom";
  std::string select = "hardnop";
  int k = 4;
  std::uint64_t seed = 0;
  int ecmp_cap = 32;
  int limit = -1;  // -1 = unlimited
  std::vector<std::string> node_limits;
  double capacity_scale = 1.0;
  long node_budget = 1000000;

  telab::PipelineConfig to_config() const {
    telab::PipelineConfig cfg;
    cfg.algorithm = telab::path_algorithm_from_string(alg);
    cfg.params.k = k;
    cfg.params.seed = seed;
    cfg.params.ecmp_cap = ecmp_cap;
    cfg.selection = select;
    if (limit >= 0) cfg.uniform_limit = limit;
    cfg.capacity_scale = capacity_scale;
    cfg.ilp_node_budget = node_budget;
    return cfg;
  }
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool tm_required) {
  cmd->add_option("--topo", f.topo, "topology JSON (or .graphml) file")
      ->required();
  auto* tm = cmd->add_option("--tm", f.tm, "traffic matrix JSON file");
  if (tm_required) tm->required();
  cmd->add_option("--alg", f.alg,
                  "path algorithm: custom|suurballe|ksp|edksp|ecmp|vlb");
  cmd->add_option("--k", f.k, "path budget for ksp/edksp/vlb");
  cmd->add_option("--seed", f.seed, "seed for all randomness");
  cmd->add_option("--ecmp-cap", f.ecmp_cap, "equal-cost path enumeration cap");
  cmd->add_option("--select", f.select, "selection method: hardnop|program");
  cmd->add_option("--limit", f.limit,
                  "uniform per-node flow entry limit (omit for unlimited)");
  cmd->add_option("--node-limit", f.node_limits,
                  "per-node limit override, node=limit (repeatable)");
  cmd->add_option("--capacity-scale", f.capacity_scale,
                  "multiply capacities by this factor in (0,1]");
  cmd->add_option("--node-budget", f.node_budget,
                  "branch-and-bound node budget for program selection");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"traffic-engineering laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.failure_message(CLI::FailureMessage::simple);

  // --- paths ---
  auto* cmd_paths = app.add_subcommand("paths", "compute a path set");
  struct {
    std::string topo, out, alg = "custom", pairs = "all";
    int k = 4;
    std::uint64_t seed = 0;
    int ecmp_cap = 32;
  } fp;
  cmd_paths->add_option("--topo", fp.topo, "topology file")->required();
  cmd_paths->add_option("--alg", fp.alg,
                        "custom|suurballe|ksp|edksp|ecmp|vlb");
  cmd_paths->add_option("--pairs", fp.pairs,
                        "'all' or comma list of src:dst");
  cmd_paths->add_option("--k", fp.k, "path budget for ksp/edksp/vlb");
  cmd_paths->add_option("--seed", fp.seed, "seed for vlb sampling");
  cmd_paths->add_option("--ecmp-cap", fp.ecmp_cap, "equal-cost path cap");
  cmd_paths->add_option("--out", fp.out, "output path-set JSON")->required();

  // --- select ---
  auto* cmd_select = app.add_subcommand("select", "select paths under limits");
  struct {
    std::string topo, paths, out, mode = "hardnop";
    int limit = -1;
    std::vector<std::string> node_limits;
    long node_budget = 1000000;
  } fs;
  cmd_select->add_option("--topo", fs.topo, "topology file")->required();
  cmd_select->add_option("--paths", fs.paths, "path-set JSON")->required();
  cmd_select->add_option("--mode", fs.mode, "hardnop|program");
  cmd_select->add_option("--limit", fs.limit,
                         "uniform per-node flow entry limit");
  cmd_select->add_option("--node-limit", fs.node_limits,
                         "per-node override, node=limit (repeatable)");
  cmd_select->add_option("--node-budget", fs.node_budget,
                         "branch-and-bound node budget");
  cmd_select->add_option("--out", fs.out, "output selection JSON")->required();

  // --- te ---
  auto* cmd_te = app.add_subcommand(
      "te", "allocate bandwidth over given paths (phases III-IV)");
  struct {
    std::string topo, paths, tm, out;
  } ft;
  cmd_te->add_option("--topo", ft.topo, "topology file")->required();
  cmd_te->add_option("--paths", ft.paths, "path-set JSON (already selected)")
      ->required();
  cmd_te->add_option("--tm", ft.tm, "traffic matrix JSON")->required();
  cmd_te->add_option("--out", ft.out, "output allocation JSON")->required();

  // --- mcf ---
  auto* cmd_mcf = app.add_subcommand("mcf", "optimal multicommodity-flow bound");
  struct {
    std::string topo, tm, out;
  } fm;
  cmd_mcf->add_option("--topo", fm.topo, "topology file")->required();
  cmd_mcf->add_option("--tm", fm.tm, "traffic matrix JSON")->required();
  cmd_mcf->add_option("--out", fm.out, "output JSON (stdout when omitted)");

  // --- tmgen ---
  auto* cmd_tmgen = app.add_subcommand("tmgen", "generate a gravity traffic matrix");
  struct {
    std::string topo, out, scheme = "uniform";
    double total = 1.0;
    std::uint64_t seed = 0;
  } fg;
  cmd_tmgen->add_option("--topo", fg.topo, "topology file")->required();
  cmd_tmgen->add_option("--total", fg.total, "total demand volume")->required();
  cmd_tmgen->add_option("--scheme", fg.scheme,
                        "uniform|degree (mass scheme)");
  cmd_tmgen->add_option("--seed", fg.seed, "mass sampling seed");
  cmd_tmgen->add_option("--out", fg.out, "output traffic matrix JSON")
      ->required();

  // --- run ---
  auto* cmd_run = app.add_subcommand("run", "full pipeline on one traffic matrix");
  RunFlags fr;
  add_run_flags(cmd_run, fr, true);
  cmd_run->add_option("--out", fr.out, "output result JSON")->required();
  cmd_run->add_option("--metrics", fr.metrics_out,
                      "also write a metrics JSON (runs the MCF oracle)");

  // --- sweep ---
  auto* cmd_sweep = app.add_subcommand(
      "sweep", "single-link-failure sweep: one pipeline run per edge");
  RunFlags fw;
  std::string sweep_dir;
  add_run_flags(cmd_sweep, fw, true);
  cmd_sweep->add_option("--out-dir", sweep_dir, "output directory")->required();

  // --- export ---
  auto* cmd_export = app.add_subcommand(
      "export", "distribution CSV/JSON bundles from result files");
  struct {
    std::string topo, out_dir, format = "csv";
    std::vector<std::string> results;
  } fe;
  cmd_export->add_option("--topo", fe.topo, "topology file")->required();
  cmd_export->add_option("--results", fe.results, "result JSON files")
      ->required()
      ->expected(-1);
  cmd_export->add_option("--format", fe.format, "csv|json");
  cmd_export->add_option("--out-dir", fe.out_dir, "output directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    using namespace telab;

    if (cmd_paths->parsed()) {
      Topology t = load_topology(fp.topo);
      PathParams params{fp.k, fp.seed, fp.ecmp_cap};
      PathSet ps = compute_path_set(t, path_algorithm_from_string(fp.alg),
                                    parse_pairs(t, fp.pairs), params);
      write_json(fp.out, path_set_to_json(t, ps));
      log_line("wrote " + fp.out);
      return 0;
    }

    if (cmd_select->parsed()) {
      Topology t = load_topology(fs.topo);
      PathSet ps = parse_path_set(t, read_file(fs.paths));
      PipelineConfig tmp;
      if (fs.limit >= 0) tmp.uniform_limit = fs.limit;
      apply_node_limits(fs.node_limits, tmp);
      FlowEntryLimits lim = pipeline_limits(t, tmp);
      SelectionResult sel =
          fs.mode == "hardnop" ? select_hardnop(t, ps, lim)
          : fs.mode == "program"
              ? select_program(t, ps, lim, fs.node_budget)
              : throw Error(ErrorKind::unknown_name,
                            "unknown selection mode '" + fs.mode + "'");
      write_json(fs.out, selection_to_json(t, ps, sel, lim));
      log_line("wrote " + fs.out);
      return 0;
    }

    if (cmd_te->parsed()) {
      Topology t = load_topology(ft.topo);
      PathSet ps = parse_path_set(t, read_file(ft.paths));
      TrafficMatrix tm = load_tm(ft.tm);
      Allocation a3 = min_max_utilization(t, ps, tm);
      Allocation final_alloc =
          a3.Z > 1.0 + 1e-9
              ? normalize_weights(max_throughput_fair(t, ps, tm, a3.Z))
              : normalize_weights(a3);
      Json j;
      j["schema"] = "telab/te-v1";
      j["z_phase3"] = a3.Z;
      j["allocation"] = allocation_to_json(t, ps, final_alloc);
      write_json(ft.out, j);
      log_line("wrote " + ft.out);
      return 0;
    }

    if (cmd_mcf->parsed()) {
      Topology t = load_topology(fm.topo);
      TrafficMatrix tm = load_tm(fm.tm);
      Json j;
      j["schema"] = "telab/mcf-v1";
      j["z_opt"] = optimal_mcf(t, tm);
      if (fm.out.empty())
        std::cout << j.dump(2) << "\n";
      else
        write_json(fm.out, j);
      return 0;
    }

    if (cmd_tmgen->parsed()) {
      Topology t = load_topology(fg.topo);
      GravityConfig cfg;
      cfg.total_demand = fg.total;
      cfg.seed = fg.seed;
      cfg.scheme = parse_scheme(fg.scheme);
      write_json(fg.out, traffic_matrix_to_json(gravity_tm(t, cfg)));
      log_line("wrote " + fg.out);
      return 0;
    }

    if (cmd_run->parsed()) {
      Topology t = load_topology(fr.topo);
      TrafficMatrix tm = load_tm(fr.tm);
      PipelineConfig cfg = fr.to_config();
      apply_node_limits(fr.node_limits, cfg);
      PipelineResult r = run_pipeline(t, tm, cfg);
      log_phases(r);
      write_json(fr.out, pipeline_result_to_json(r, cfg));
      log_line("wrote " + fr.out);
      if (!fr.metrics_out.empty()) {
        double zopt = optimal_mcf(r.topo, tm);
        write_json(fr.metrics_out, metrics_to_json(compute_metrics(r, zopt)));
        log_line("wrote " + fr.metrics_out);
      }
      return 0;
    }

    if (cmd_sweep->parsed()) {
      Topology t = load_topology(fw.topo);
      TrafficMatrix tm = load_tm(fw.tm);
      PipelineConfig cfg = fw.to_config();
      apply_node_limits(fw.node_limits, cfg);

      std::vector<PipelineResult> runs = failure_sweep(t, tm, cfg);
      std::vector<MetricsReport> reports;
      Json summary = Json::array();
      for (int e = 0; e < t.edge_count(); ++e) {
        char name[32];
        std::snprintf(name, sizeof name, "failure_%03d.json", e);
        std::string path =
            (std::filesystem::path(sweep_dir) / name).string();
        write_json(path, pipeline_result_to_json(runs[e], cfg));
        double zopt;
        try {
          zopt = optimal_mcf(runs[e].topo, tm);
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::infeasible) throw;
          zopt = 0.0;  // failure disconnected a demand pair
        }
        MetricsReport m = compute_metrics(runs[e], zopt);
        reports.push_back(m);
        Json row = metrics_to_json(m);
        row["failed_edge"] = {{"u", t.nodes[t.edges[e].u]},
                              {"v", t.nodes[t.edges[e].v]}};
        row["result_file"] = name;
        summary.push_back(std::move(row));
      }
      Json top;
      top["schema"] = "telab/sweep-v1";
      top["failures"] = std::move(summary);
      write_json((std::filesystem::path(sweep_dir) / "summary.json").string(),
                 top);
      for (const auto& [name, csv] : export_distributions(reports))
        write_file((std::filesystem::path(sweep_dir) / name).string(), csv);
      write_json(
          (std::filesystem::path(sweep_dir) / "manifest.json").string(),
          manifest_json("sweep", cfg, t.name, runs.size()));
      log_line("wrote sweep bundle to " + sweep_dir);
      return 0;
    }

    if (cmd_export->parsed()) {
      Topology t = load_topology(fe.topo);
      if (fe.format != "csv" && fe.format != "json")
        throw Error(ErrorKind::unknown_name,
                    "unknown export format '" + fe.format + "'");
      std::vector<MetricsReport> reports;
      for (const std::string& path : fe.results) {
        Json j;
        try {
          j = Json::parse(read_file(path));
        } catch (const nlohmann::json::exception& ex) {
          throw Error(ErrorKind::parse,
                      "result JSON '" + path + "': " + ex.what());
        }
        if (j.value("schema", "") != "telab/result-v1")
          throw Error(ErrorKind::parse,
                      "'" + path + "' is not a telab/result-v1 file");
        try {
          reports.push_back(metrics_from_result_json(t, j));
        } catch (const nlohmann::json::exception& ex) {
          throw Error(ErrorKind::parse,
                      "result JSON '" + path + "': " + ex.what());
        }
      }
      auto bundles = export_distributions(reports);
      if (fe.format == "csv") {
        for (const auto& [name, csv] : bundles)
          write_file((std::filesystem::path(fe.out_dir) / name).string(), csv);
      } else {
        Json j;
        j["schema"] = "telab/distributions-v1";
        for (const auto& [name, csv] : bundles) {
          // re-emit each x,y table as an array of [x, y] rows
          Json rows = Json::array();
          std::stringstream ss(csv);
          std::string line;
          std::getline(ss, line);  // header
          while (std::getline(ss, line)) {
            auto comma = line.find(',');
            rows.push_back({std::stod(line.substr(0, comma)),
                            std::stod(line.substr(comma + 1))});
          }
          std::string key = name.substr(0, name.size() - 4);  // drop .csv
          j[key] = std::move(rows);
        }
        write_json(
            (std::filesystem::path(fe.out_dir) / "distributions.json").string(),
            j);
      }
      log_line("wrote distributions to " + fe.out_dir);
      return 0;
    }

    std::cerr << "error: usage: no subcommand\n";
    return 2;
  } catch (const telab::Error& e) {
    std::cerr << "error: " << telab::error_kind_name(e.kind()) << ": "
              << e.what() << "\n";
    switch (e.kind()) {
      case telab::ErrorKind::io: return 3;
      case telab::ErrorKind::parse: return 4;
      case telab::ErrorKind::validation:
      case telab::ErrorKind::precondition:
      case telab::ErrorKind::unknown_name:
      case telab::ErrorKind::infeasible: return 5;
      case telab::ErrorKind::internal: return 6;
    }
    return 6;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 6;
  }
}
