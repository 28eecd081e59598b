// Copyright 2026 The LLP Tree Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "llp/experiment.hpp"
#include "llp/graphml.hpp"
#include "llp/json_io.hpp"
#include "llp/log.hpp"
#include "llp/population.hpp"
#include "llp/tree_opt.hpp"

namespace llp {

// Exit codes: 0 success, 1 input error, 2 invariant violation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInvariant = 2;

namespace cli_detail {

struct Options {
  std::string topology;
  std::string counties;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string heuristics = "centers,detours,shortcuts";
  std::string policy_path;
  std::string tree_path;
  std::string tree_out;
  std::string events_path;
  std::uint64_t seed = 1;
  int connections = 10000;
  int moves = 1000;
  double factor = kDefaultPropagationFactor;
  double lt = 2.0;
  double alpha = 2.0;
};

inline MetricGraph load_graph(const Options& opt, std::vector<CountyRecord>* counties_out) {
  if (opt.topology.empty()) throw InputError("--topology is required");
  const LoadedTopology topo = load_topology(opt.topology);
  if (topo.dropped_nodes > 0)
    log_info("dropped " + std::to_string(topo.dropped_nodes) +
             " nodes without coordinates");
  MetricGraph graph = metric_closure(topo.sites, topo.edges, opt.factor);
  if (!opt.counties.empty()) {
    const PopulationData pop = load_population(opt.counties);
    if (pop.skipped_rows > 0)
      log_info("skipped " + std::to_string(pop.skipped_rows) + " malformed county rows");
    graph = assign_weights(std::move(graph), pop.counties);
    if (counties_out != nullptr) *counties_out = pop.counties;
  }
  return graph;
}

inline LlpTree build_or_load_tree(const Options& opt, const MetricGraph& graph) {
  if (!opt.tree_path.empty()) return tree_from_json(load_json_file(opt.tree_path), graph);

  HcsParams params;
  params.lt = opt.lt;
  params.alpha = opt.alpha;
  params.seed = opt.seed;
  LlpTree tree = build_tree(graph, params);

  // selection is a set; application order is fixed (centers, then detours,
  // then shortcuts) because the later passes assume the earlier ones ran
  bool want_centers = false, want_detours = false, want_shortcuts = false;
  std::string token;
  for (const char c : opt.heuristics + ",") {
    if (c != ',') {
      token.push_back(c);
      continue;
    }
    if (token.empty() || token == "none") {
    } else if (token == "centers") {
      want_centers = true;
    } else if (token == "detours") {
      want_detours = true;
    } else if (token == "shortcuts") {
      want_shortcuts = true;
    } else {
      throw InputError("unknown heuristic '" + token +
                       "' (expected centers, detours, shortcuts or none)");
    }
    token.clear();
  }
  if (want_centers) tree = reset_centers(tree, graph);
  if (want_detours) tree = stretch_detours(tree, graph);
  if (want_shortcuts) {
    const InflationPolicy policy = opt.policy_path.empty()
                                       ? default_policy(graph)
                                       : policy_from_json(load_json_file(opt.policy_path));
    tree = augment_shortcuts(tree, graph, policy);
  }
  return tree;
}

inline int validate_and_report(const LlpTree& tree, const MetricGraph& graph) {
  std::vector<std::string> violations = validate_tree(tree, graph);
  if (!check_depth_bound(tree, graph)) violations.push_back("tree depth exceeds its bound");
  check_level_edge_bound(tree, graph, &violations);
  if (violations.empty()) {
    std::cout << "tree ok: " << tree.node_count() << " nodes, depth " << tree.depth()
              << ", " << tree.shortcuts.size() << " shortcuts\n";
    return kExitOk;
  }
  for (const std::string& v : violations) std::cerr << "violation: " << v << '\n';
  return kExitInvariant;
}

inline std::filesystem::path out_file(const Options& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  return std::filesystem::path(opt.out_dir) / name;
}

}  // namespace cli_detail

/// Entry point shared by the binary and the tests. `args` excludes argv[0].
inline int run_cli(const std::vector<std::string>& args) {
  using cli_detail::Options;
  Options opt;

  CLI::App app{"LLP overlay tree construction and mobility evaluation"};
  app.require_subcommand(1);
  app.fallthrough(true);
  app.add_option("--topology", opt.topology, "GraphML topology file");
  app.add_option("--counties", opt.counties, "county population CSV");
  app.add_option("--out", opt.out_dir, "output directory")->capture_default_str();
  app.add_option("--format", opt.format, "csv writes report.json plus CSV tables; json only the report")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--seed", opt.seed, "seed for tree permutation and workload")
      ->capture_default_str();
  app.add_option("--connections", opt.connections, "connections to sample")
      ->capture_default_str();
  app.add_option("--moves", opt.moves, "mobility events to sample")->capture_default_str();
  app.add_option("--factor", opt.factor, "geodesic propagation factor")
      ->capture_default_str();
  app.add_option("--lt", opt.lt, "cluster latency threshold, ms")->capture_default_str();
  app.add_option("--alpha", opt.alpha, "threshold decay per level")->capture_default_str();
  app.add_option("--heuristics", opt.heuristics,
                 "subset of centers,detours,shortcuts (applied in that order), or none")
      ->capture_default_str();
  app.add_option("--epsilon-policy", opt.policy_path, "inflation policy JSON");
  app.add_option("--tree", opt.tree_path, "load this tree JSON instead of building");
  app.add_option("--events", opt.events_path, "write protocol events as JSON lines");

  CLI::App* cmd_build = app.add_subcommand("build", "construct the overlay tree");
  cmd_build->add_option("--tree-out", opt.tree_out, "tree JSON destination");
  std::string graph_out;
  cmd_build->add_option("--graph-out", graph_out, "also write the latency metric as JSON");
  CLI::App* cmd_inflate = app.add_subcommand("inflate", "CSR latency inflation experiment");
  CLI::App* cmd_memory = app.add_subcommand("memory", "mapping entry memory experiment");
  CLI::App* cmd_update = app.add_subcommand("update", "mobility update experiment");
  CLI::App* cmd_all = app.add_subcommand("all", "run every experiment");
  CLI::App* cmd_validate = app.add_subcommand("validate", "check invariants of a tree JSON");
  for (CLI::App* sub : {cmd_build, cmd_inflate, cmd_memory, cmd_update, cmd_all, cmd_validate})
    sub->fallthrough(true);

  std::vector<const char*> argv{"llp"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    std::vector<CountyRecord> counties;
    const MetricGraph graph = cli_detail::load_graph(opt, &counties);

    if (cmd_validate->parsed()) {
      if (opt.tree_path.empty()) throw InputError("validate: --tree is required");
      const LlpTree tree = tree_from_json(load_json_file(opt.tree_path), graph);
      return cli_detail::validate_and_report(tree, graph);
    }

    const LlpTree tree = cli_detail::build_or_load_tree(opt, graph);

    if (cmd_build->parsed()) {
      const std::string dest = opt.tree_out.empty()
                                   ? cli_detail::out_file(opt, "tree.json").string()
                                   : opt.tree_out;
      write_json_file(tree_to_json(tree), dest);
      if (!graph_out.empty()) write_json_file(graph_to_json(graph), graph_out);
      std::cout << "tree written to " << dest << '\n';
      return cli_detail::validate_and_report(tree, graph);
    }

    if (counties.empty())
      throw InputError("experiments need --counties for the population workload");
    const Workload workload =
        gen_workload(counties, graph, tree, opt.connections, opt.moves, opt.seed);

    std::ofstream events;
    std::ostream* event_log = nullptr;
    if (!opt.events_path.empty()) {
      events.open(opt.events_path, std::ios::binary);
      if (!events) throw InputError("cannot write " + opt.events_path);
      event_log = &events;
    }

    ExperimentReport report;
    report.provenance.topology = std::filesystem::path(opt.topology).filename().string();
    report.provenance.counties = std::filesystem::path(opt.counties).filename().string();
    report.provenance.heuristics = opt.tree_path.empty() ? opt.heuristics : "(loaded tree)";
    report.provenance.lt = tree.params.lt;
    report.provenance.alpha = tree.params.alpha;
    report.provenance.factor = opt.factor;
    report.provenance.seed = opt.seed;
    report.provenance.connections = opt.connections;
    report.provenance.moves = opt.moves;

    const bool want_inflation = cmd_inflate->parsed() || cmd_all->parsed();
    const bool want_memory = cmd_memory->parsed() || cmd_all->parsed();
    const bool want_update = cmd_update->parsed() || cmd_all->parsed();
    if (want_inflation)
      report.inflation = run_inflation(tree, graph, workload, counties, opt.factor, 10.0,
                                       60.0, event_log);
    if (want_memory) report.memory = run_memory(tree, graph, workload, counties, opt.factor);
    if (want_update)
      report.update =
          run_update(tree, graph, workload, counties, opt.factor, 10.0, 60.0, event_log);

    write_json_file(report_to_json(report), cli_detail::out_file(opt, "report.json").string());
    if (opt.format == "csv") {
      if (report.inflation) {
        write_inflation_csv(*report.inflation,
                            cli_detail::out_file(opt, "inflation.csv").string());
        write_cdf_csv(*report.inflation, cli_detail::out_file(opt, "cdf.csv").string());
      }
      if (report.memory)
        write_memory_csv(*report.memory, cli_detail::out_file(opt, "memory.csv").string());
      if (report.update)
        write_update_csv(*report.update, cli_detail::out_file(opt, "update.csv").string());
    }
    if (report.inflation)
      std::cout << "mean inflation: tree " << report.inflation->mean_infl_tree_csr
                << ", centralized " << report.inflation->mean_infl_centralized << ", lisp "
                << report.inflation->mean_infl_lisp << '\n';
    if (report.memory)
      std::cout << "entries per gip: tree " << report.memory->mean_tree_entries
                << ", worst case " << report.memory->worst_case_entries << '\n';
    if (report.update)
      std::cout << "mean disruption: llp " << report.update->mean_llp_disruption
                << " ms, lisp " << report.update->mean_lisp_disruption << " ms\n";
    return kExitOk;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace llp
