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

#include <fstream>
#include <string>

#include <json.hpp>

#include "llp/common.hpp"
#include "llp/experiment.hpp"
#include "llp/metric_graph.hpp"
#include "llp/tree.hpp"
#include "llp/tree_opt.hpp"

namespace llp {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// MetricGraph

inline Json graph_to_json(const MetricGraph& graph) {
  Json j;
  j["schema"] = "llp-graph-1";
  Json sites = Json::array();
  for (const PopSite& s : graph.sites()) {
    sites.push_back(Json{{"id", s.id},
                         {"name", s.name},
                         {"lat", s.lat},
                         {"lon", s.lon},
                         {"weight", s.weight}});
  }
  j["sites"] = std::move(sites);
  Json rows = Json::array();
  for (int i = 0; i < graph.size(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < graph.size(); ++k) row.push_back(graph.latency(i, k));
    rows.push_back(std::move(row));
  }
  j["latency"] = std::move(rows);
  return j;
}

// ---------------------------------------------------------------------------
// LlpTree

inline Json tree_to_json(const LlpTree& tree) {
  Json j;
  j["schema"] = "llp-tree-1";
  j["params"] = Json{{"lt", tree.params.lt},
                     {"alpha", tree.params.alpha},
                     {"seed", tree.params.seed},
                     {"pi", tree.pi}};
  j["root"] = tree.root;
  Json nodes = Json::array();
  for (const LlpNode& n : tree.nodes) {
    nodes.push_back(Json{{"id", n.id},
                         {"level", n.level},
                         {"center", n.center},
                         {"members", n.members},
                         {"parent", n.parent},
                         {"rec_depth", n.rec_depth}});
  }
  j["nodes"] = std::move(nodes);
  Json edges = Json::array();
  for (const LlpNode& n : tree.nodes) {
    if (n.parent < 0) continue;
    edges.push_back(Json{{"parent", n.parent}, {"child", n.id}, {"latency", n.parent_latency}});
  }
  j["edges"] = std::move(edges);
  Json shortcuts = Json::array();
  for (const Shortcut& s : tree.shortcuts)
    shortcuts.push_back(Json{{"from", s.from}, {"to", s.to}, {"latency", s.latency}});
  j["shortcuts"] = std::move(shortcuts);
  return j;
}

inline LlpTree tree_from_json(const Json& j, const MetricGraph& graph) {
  try {
    LlpTree tree;
    tree.params.lt = j.at("params").at("lt").get<double>();
    tree.params.alpha = j.at("params").at("alpha").get<double>();
    tree.params.seed = j.at("params").at("seed").get<std::uint64_t>();
    tree.pi = j.at("params").at("pi").get<std::vector<int>>();
    tree.root = j.at("root").get<int>();
    for (const Json& n : j.at("nodes")) {
      LlpNode node;
      node.id = n.at("id").get<int>();
      node.center = n.at("center").get<int>();
      node.members = n.at("members").get<std::vector<int>>();
      node.parent = n.at("parent").get<int>();
      node.rec_depth = n.value("rec_depth", 0);
      tree.nodes.push_back(std::move(node));
    }
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const LlpNode& n = tree.nodes[i];
      if (n.id != static_cast<int>(i))
        throw InputError("tree json: node ids must be dense and ordered");
      // preorder keeps the structure acyclic and lets one pass settle depths
      if (n.parent >= n.id || n.parent < -1)
        throw InputError("tree json: every parent must precede its child");
    }
    if (tree.root < 0 || tree.root >= tree.node_count())
      throw InputError("tree json: root out of range");
    for (const Json& s : j.at("shortcuts")) {
      const Shortcut sc{s.at("from").get<int>(), s.at("to").get<int>(),
                        s.at("latency").get<double>()};
      if (sc.from < 0 || sc.from >= tree.node_count() || sc.to < 0 ||
          sc.to >= tree.node_count())
        throw InputError("tree json: shortcut endpoint out of range");
      tree.shortcuts.push_back(sc);
    }
    std::sort(tree.shortcuts.begin(), tree.shortcuts.end());
    tree.rebuild_derived(graph);
    return tree;
  } catch (const Json::exception& e) {
    throw InputError(std::string("tree json: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw InputError(std::string("tree json: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// InflationPolicy: [{"lo":..,"hi":..,"eps":..}, ...]

inline Json policy_to_json(const InflationPolicy& policy) {
  Json j = Json::array();
  for (const PolicyRange& r : policy.ranges)
    j.push_back(Json{{"lo", r.lo}, {"hi", r.hi}, {"eps", r.epsilon}});
  return j;
}

inline InflationPolicy policy_from_json(const Json& j) {
  try {
    InflationPolicy policy;
    for (const Json& r : j)
      policy.ranges.push_back(PolicyRange{r.at("lo").get<double>(), r.at("hi").get<double>(),
                                          r.at("eps").get<double>()});
    policy.validate();
    return policy;
  } catch (const Json::exception& e) {
    throw InputError(std::string("policy json: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// ExperimentReport

inline Json report_to_json(const ExperimentReport& report) {
  Json j;
  j["schema"] = "llp-report-1";
  const Provenance& p = report.provenance;
  j["provenance"] = Json{{"version", p.version},   {"topology", p.topology},
                         {"counties", p.counties}, {"heuristics", p.heuristics},
                         {"lt", p.lt},             {"alpha", p.alpha},
                         {"factor", p.factor},     {"seed", p.seed},
                         {"connections", p.connections}, {"moves", p.moves}};
  if (report.inflation) {
    const InflationSection& s = *report.inflation;
    Json sec;
    sec["means"] = Json{{"direct", s.mean_direct},
                        {"tree", s.mean_tree_csr},
                        {"tree_path", s.mean_tree_path},
                        {"centralized", s.mean_centralized},
                        {"lisp", s.mean_lisp}};
    sec["mean_inflation"] = Json{{"tree", s.mean_infl_tree_csr},
                                 {"tree_path", s.mean_infl_tree_path},
                                 {"centralized", s.mean_infl_centralized},
                                 {"lisp", s.mean_infl_lisp}};
    sec["undelivered"] = s.undelivered;
    Json buckets = Json::array();
    for (const LatencyBucket& b : s.buckets)
      buckets.push_back(Json{{"lo", b.lo},
                             {"hi", std::isfinite(b.hi) ? Json(b.hi) : Json()},
                             {"count", b.count},
                             {"mean_infl_tree", b.mean_tree},
                             {"mean_infl_centralized", b.mean_centralized},
                             {"mean_infl_lisp", b.mean_lisp}});
    sec["buckets"] = std::move(buckets);
    Json records = Json::array();
    for (const InflationRecord& r : s.records)
      records.push_back(Json{{"conn", r.conn},
                             {"cn_county", r.cn_county},
                             {"mn_county", r.mn_county},
                             {"cn_site", r.cn_site},
                             {"mn_site", r.mn_site},
                             {"direct", r.direct},
                             {"tree", r.tree_csr},
                             {"tree_path", r.tree_path},
                             {"centralized", r.centralized},
                             {"lisp", r.lisp}});
    sec["records"] = std::move(records);
    j["inflation"] = std::move(sec);
  }
  if (report.memory) {
    const MemorySection& s = *report.memory;
    Json sec;
    sec["mean_tree_entries"] = s.mean_tree_entries;
    sec["mean_shortcut_entries"] = s.mean_shortcut_entries;
    sec["mean_leaf_depth"] = s.mean_leaf_depth;
    sec["mean_leaf_depth_unweighted"] = s.mean_leaf_depth_unweighted;
    sec["worst_case_entries"] = s.worst_case_entries;
    sec["worst_over_tree_ratio"] = s.worst_over_tree_ratio;
    Json records = Json::array();
    for (const MemoryRecord& r : s.records)
      records.push_back(Json{{"gip", r.gip},
                             {"leaf", r.leaf},
                             {"depth", r.depth},
                             {"tree_entries", r.tree_entries},
                             {"shortcut_entries", r.shortcut_entries}});
    sec["records"] = std::move(records);
    j["memory"] = std::move(sec);
  }
  if (report.update) {
    const UpdateSection& s = *report.update;
    Json sec;
    sec["mean_llp_disruption"] = s.mean_llp_disruption;
    sec["mean_lisp_disruption"] = s.mean_lisp_disruption;
    sec["mean_nodes_mapping"] = s.mean_nodes_mapping;
    sec["mean_nodes_shortcut"] = s.mean_nodes_shortcut;
    Json buckets = Json::array();
    for (const UpdateBucket& b : s.buckets)
      buckets.push_back(Json{{"lo", b.lo},
                             {"hi", std::isfinite(b.hi) ? Json(b.hi) : Json()},
                             {"count", b.count},
                             {"mean_llp", b.mean_llp},
                             {"mean_lisp", b.mean_lisp}});
    sec["buckets"] = std::move(buckets);
    Json records = Json::array();
    for (const UpdateRecord& r : s.records)
      records.push_back(Json{{"move", r.move},
                             {"gip", r.gip},
                             {"from_leaf", r.from_leaf},
                             {"to_leaf", r.to_leaf},
                             {"attach_direct", r.attach_direct},
                             {"llp_disruption", r.llp_disruption},
                             {"lisp_disruption", r.lisp_disruption},
                             {"nodes_mapping", r.nodes_mapping},
                             {"nodes_shortcut", r.nodes_shortcut},
                             {"nodes_count_refresh", r.nodes_count}});
    sec["records"] = std::move(records);
    j["update"] = std::move(sec);
  }
  return j;
}

// ---------------------------------------------------------------------------
// file helpers

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline void write_json_file(const Json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace llp
