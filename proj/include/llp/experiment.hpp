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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "llp/baselines.hpp"
#include "llp/common.hpp"
#include "llp/geo.hpp"
#include "llp/metric_graph.hpp"
#include "llp/population.hpp"
#include "llp/protocol.hpp"
#include "llp/tree.hpp"
#include "llp/workload.hpp"

namespace llp {

inline constexpr const char* kVersionString = "llp-tree 0.1.0";

struct InflationRecord {
  int conn = 0;
  int cn_county = -1, mn_county = -1;
  int cn_site = -1, mn_site = -1;
  double direct = 0, tree_csr = 0, tree_path = 0, centralized = 0, lisp = 0;

  double infl(double v) const { return direct > 0 ? v / direct - 1.0 : 0.0; }
};

struct LatencyBucket {
  double lo = 0, hi = 0;
  int count = 0;
  double mean_tree = 0, mean_centralized = 0, mean_lisp = 0;  // mean inflation
};

struct InflationSection {
  std::vector<InflationRecord> records;
  double mean_direct = 0, mean_tree_csr = 0, mean_tree_path = 0;
  double mean_centralized = 0, mean_lisp = 0;
  double mean_infl_tree_csr = 0, mean_infl_tree_path = 0;
  double mean_infl_centralized = 0, mean_infl_lisp = 0;
  std::vector<LatencyBucket> buckets;
  int undelivered = 0;
};

struct MemoryRecord {
  std::uint64_t gip = 0;
  int leaf = -1;
  int depth = 0;
  int tree_entries = 0;
  int shortcut_entries = 0;
};

struct MemorySection {
  std::vector<MemoryRecord> records;
  double mean_tree_entries = 0;
  double mean_shortcut_entries = 0;
  double mean_leaf_depth = 0;             // over registered gips
  double mean_leaf_depth_unweighted = 0;  // over leaf nodes
  int worst_case_entries = 0;
  double worst_over_tree_ratio = 0;
};

struct UpdateRecord {
  int move = 0;
  std::uint64_t gip = 0;
  int from_leaf = -1, to_leaf = -1;
  double attach_direct = 0;  // old to new attachment, the bucket key
  double llp_disruption = 0, lisp_disruption = 0;
  int nodes_mapping = 0, nodes_shortcut = 0, nodes_count = 0;
};

struct UpdateBucket {
  double lo = 0, hi = 0;
  int count = 0;
  double mean_llp = 0, mean_lisp = 0;
};

struct UpdateSection {
  std::vector<UpdateRecord> records;
  double mean_llp_disruption = 0, mean_lisp_disruption = 0;
  double mean_nodes_mapping = 0, mean_nodes_shortcut = 0;
  std::vector<UpdateBucket> buckets;
};

struct Provenance {
  std::string version = kVersionString;
  std::string topology, counties, heuristics;
  double lt = 0, alpha = 0, factor = kDefaultPropagationFactor;
  std::uint64_t seed = 0;
  int connections = 0, moves = 0;
};

struct ExperimentReport {
  Provenance provenance;
  std::optional<InflationSection> inflation;
  std::optional<MemorySection> memory;
  std::optional<UpdateSection> update;
};

namespace exp_detail {

inline double county_leg(const CountyRecord& county, const PopSite& site, double factor) {
  return geodesic_latency_ms(county.lat, county.lon, site.lat, site.lon, factor);
}

inline std::string pip_name(std::uint64_t gip, int generation) {
  return "pip-" + std::to_string(gip) + "-" + std::to_string(generation);
}

/// Registers one single-access MN per connection; the binding leaf is the
/// anycast-nearest leaf from the MN's attachment site.
inline void register_workload(Simulator& sim, const Workload& w,
                              const std::vector<CountyRecord>& counties, double factor) {
  for (std::size_t i = 0; i < w.connections.size(); ++i) {
    const Connection& c = w.connections[i];
    const Gip gip{i + 1};
    const int leaf = sim.nearest_leaf(c.mn_site);
    AccessBinding b;
    b.gip = gip;
    b.access = access::kFiveG;
    b.pip = pip_name(gip.value, 0);
    b.leaf = leaf;
    b.attach_latency =
        sim.graph().latency(c.mn_site, sim.tree().node(leaf).center) +
        county_leg(counties.at(static_cast<std::size_t>(c.mn_county)),
                   sim.graph().site(c.mn_site), factor);
    sim.register_binding(b);
  }
}

}  // namespace exp_detail

/// Latency comparison across the four schemes for every connection.
inline InflationSection run_inflation(const LlpTree& tree, const MetricGraph& graph,
                                      const Workload& workload,
                                      const std::vector<CountyRecord>& counties,
                                      double factor = kDefaultPropagationFactor,
                                      double bucket_width_ms = 10.0,
                                      double bucket_max_ms = 60.0,
                                      std::ostream* event_log = nullptr) {
  InflationSection out;
  const int anchor = default_anchor(tree);
  Simulator sim(tree, graph);
  sim.set_event_log(event_log);
  exp_detail::register_workload(sim, workload, counties, factor);

  for (std::size_t i = 0; i < workload.connections.size(); ++i) {
    const Connection& c = workload.connections[i];
    const CountyRecord& cn_county = counties.at(static_cast<std::size_t>(c.cn_county));
    const CountyRecord& mn_county = counties.at(static_cast<std::size_t>(c.mn_county));
    const double cn_leg = exp_detail::county_leg(cn_county, graph.site(c.cn_site), factor);
    const double mn_leg = exp_detail::county_leg(mn_county, graph.site(c.mn_site), factor);

    InflationRecord rec;
    rec.conn = static_cast<int>(i);
    rec.cn_county = c.cn_county;
    rec.mn_county = c.mn_county;
    rec.cn_site = c.cn_site;
    rec.mn_site = c.mn_site;
    rec.direct = cn_leg + graph.latency(c.cn_site, c.mn_site) + mn_leg;

    const DeliveryTrace trace = sim.forward_csr(c.cn_site, Gip{i + 1});
    if (!trace.delivered) {
      ++out.undelivered;
      continue;
    }
    rec.tree_csr = cn_leg + trace.setup_latency();
    rec.tree_path = cn_leg + tree.tree_path_latency(graph, c.cn_site, c.mn_site) + mn_leg;
    rec.centralized =
        centralized_csr_latency(graph, anchor, c.cn_site, c.mn_site, cn_leg, mn_leg);
    rec.lisp = lisp_miss_csr_latency(graph, anchor, c.cn_site, c.mn_site, cn_leg, mn_leg);
    out.records.push_back(rec);
  }

  const double n = static_cast<double>(out.records.size());
  if (n > 0) {
    for (const InflationRecord& r : out.records) {
      out.mean_direct += r.direct;
      out.mean_tree_csr += r.tree_csr;
      out.mean_tree_path += r.tree_path;
      out.mean_centralized += r.centralized;
      out.mean_lisp += r.lisp;
      out.mean_infl_tree_csr += r.infl(r.tree_csr);
      out.mean_infl_tree_path += r.infl(r.tree_path);
      out.mean_infl_centralized += r.infl(r.centralized);
      out.mean_infl_lisp += r.infl(r.lisp);
    }
    out.mean_direct /= n;
    out.mean_tree_csr /= n;
    out.mean_tree_path /= n;
    out.mean_centralized /= n;
    out.mean_lisp /= n;
    out.mean_infl_tree_csr /= n;
    out.mean_infl_tree_path /= n;
    out.mean_infl_centralized /= n;
    out.mean_infl_lisp /= n;
  }

  // inflation by direct-latency bucket
  for (double lo = 0.0; lo < bucket_max_ms + bucket_width_ms / 2; lo += bucket_width_ms) {
    LatencyBucket b;
    b.lo = lo;
    b.hi = lo + bucket_width_ms > bucket_max_ms ? std::numeric_limits<double>::infinity()
                                                : lo + bucket_width_ms;
    out.buckets.push_back(b);
    if (!std::isfinite(b.hi)) break;
  }
  for (const InflationRecord& r : out.records) {
    for (LatencyBucket& b : out.buckets) {
      if (r.direct >= b.lo && r.direct < b.hi) {
        ++b.count;
        b.mean_tree += r.infl(r.tree_csr);
        b.mean_centralized += r.infl(r.centralized);
        b.mean_lisp += r.infl(r.lisp);
        break;
      }
    }
  }
  for (LatencyBucket& b : out.buckets) {
    if (b.count == 0) continue;
    b.mean_tree /= b.count;
    b.mean_centralized /= b.count;
    b.mean_lisp /= b.count;
  }
  return out;
}

/// Mapping-entry footprint per gip, against the full-replication worst case.
inline MemorySection run_memory(const LlpTree& tree, const MetricGraph& graph,
                                const Workload& workload,
                                const std::vector<CountyRecord>& counties,
                                double factor = kDefaultPropagationFactor) {
  MemorySection out;
  Simulator sim(tree, graph);
  exp_detail::register_workload(sim, workload, counties, factor);

  std::map<std::uint64_t, MemoryRecord> per_gip;
  for (std::size_t i = 0; i < workload.connections.size(); ++i) {
    MemoryRecord rec;
    rec.gip = i + 1;
    const auto& b = sim.bindings().at({Gip{i + 1}, access::kFiveG});
    rec.leaf = b.leaf;
    rec.depth = tree.node(b.leaf).depth;
    per_gip[rec.gip] = rec;
  }
  for (const LlpNode& n : tree.nodes) {
    const NodeTable& tbl = sim.table(n.id);
    for (const auto& [key, _] : tbl.leaf_entries) ++per_gip.at(key.first.value).tree_entries;
    for (const auto& [key, _] : tbl.child_entries) ++per_gip.at(key.first.value).tree_entries;
    for (const auto& [gip, targets] : tbl.shortcut_entries)
      per_gip.at(gip.value).shortcut_entries += static_cast<int>(targets.size());
  }
  for (const auto& [_, rec] : per_gip) out.records.push_back(rec);

  const double n = static_cast<double>(out.records.size());
  if (n > 0) {
    for (const MemoryRecord& r : out.records) {
      out.mean_tree_entries += r.tree_entries;
      out.mean_shortcut_entries += r.shortcut_entries;
      out.mean_leaf_depth += r.depth;
    }
    out.mean_tree_entries /= n;
    out.mean_shortcut_entries /= n;
    out.mean_leaf_depth /= n;
  }
  int leaves = 0;
  for (const LlpNode& node : tree.nodes)
    if (node.is_leaf()) {
      out.mean_leaf_depth_unweighted += node.depth;
      ++leaves;
    }
  if (leaves > 0) out.mean_leaf_depth_unweighted /= leaves;
  out.worst_case_entries = lisp_worst_case_entries(tree);
  out.worst_over_tree_ratio =
      out.mean_tree_entries > 0 ? out.worst_case_entries / out.mean_tree_entries : 0.0;
  return out;
}

/// Mobility-event cost: our disruption model against the LISP chain, and
/// how many overlay nodes each update touches.
inline UpdateSection run_update(const LlpTree& tree, const MetricGraph& graph,
                                const Workload& workload,
                                const std::vector<CountyRecord>& counties,
                                double factor = kDefaultPropagationFactor,
                                double bucket_width_ms = 10.0,
                                double bucket_max_ms = 60.0,
                                std::ostream* event_log = nullptr) {
  UpdateSection out;
  const int anchor = default_anchor(tree);
  Simulator sim(tree, graph);
  sim.set_event_log(event_log);
  exp_detail::register_workload(sim, workload, counties, factor);

  std::vector<int> generation(workload.connections.size(), 0);
  for (std::size_t m = 0; m < workload.moves.size(); ++m) {
    const MoveEvent& mv = workload.moves[m];
    const Connection& conn = workload.connections.at(static_cast<std::size_t>(mv.connection));
    const Gip gip{static_cast<std::uint64_t>(mv.connection) + 1};
    const int new_site = tree.node(mv.to_leaf).center;

    UpdateRecord rec;
    rec.move = static_cast<int>(m);
    rec.gip = gip.value;
    rec.from_leaf = mv.from_leaf;
    rec.to_leaf = mv.to_leaf;
    rec.attach_direct =
        graph.latency(tree.node(mv.from_leaf).center, tree.node(mv.to_leaf).center);

    const UpdateTrace trace = sim.move_binding(
        gip, mv.access, mv.to_leaf,
        exp_detail::pip_name(gip.value, ++generation[static_cast<std::size_t>(mv.connection)]),
        /*new_attach_latency=*/0.0);
    rec.nodes_mapping = trace.mapping_nodes();
    rec.nodes_shortcut = trace.shortcut_nodes();
    rec.nodes_count = trace.count_refresh_nodes();

    // endpoints handle the event themselves: discovery plus one direct leg
    rec.llp_disruption = kMobilityDiscoveryMs + graph.latency(conn.cn_site, new_site);
    const int itr_site = tree.node(sim.nearest_leaf(conn.cn_site)).center;
    rec.lisp_disruption = lisp_update_disruption(
        graph, new_site, tree.node(mv.from_leaf).center, tree.node(mv.to_leaf).center,
        itr_site, anchor);
    out.records.push_back(rec);
  }

  const double n = static_cast<double>(out.records.size());
  if (n > 0) {
    for (const UpdateRecord& r : out.records) {
      out.mean_llp_disruption += r.llp_disruption;
      out.mean_lisp_disruption += r.lisp_disruption;
      out.mean_nodes_mapping += r.nodes_mapping;
      out.mean_nodes_shortcut += r.nodes_shortcut;
    }
    out.mean_llp_disruption /= n;
    out.mean_lisp_disruption /= n;
    out.mean_nodes_mapping /= n;
    out.mean_nodes_shortcut /= n;
  }

  for (double lo = 0.0; lo < bucket_max_ms + bucket_width_ms / 2; lo += bucket_width_ms) {
    UpdateBucket b;
    b.lo = lo;
    b.hi = lo + bucket_width_ms > bucket_max_ms ? std::numeric_limits<double>::infinity()
                                                : lo + bucket_width_ms;
    out.buckets.push_back(b);
    if (!std::isfinite(b.hi)) break;
  }
  for (const UpdateRecord& r : out.records) {
    for (UpdateBucket& b : out.buckets) {
      if (r.attach_direct >= b.lo && r.attach_direct < b.hi) {
        ++b.count;
        b.mean_llp += r.llp_disruption;
        b.mean_lisp += r.lisp_disruption;
        break;
      }
    }
  }
  for (UpdateBucket& b : out.buckets) {
    if (b.count == 0) continue;
    b.mean_llp /= b.count;
    b.mean_lisp /= b.count;
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV emission. Every file starts with a schema comment line; floats print
// with six significant digits.

namespace exp_detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace exp_detail

inline void write_inflation_csv(const InflationSection& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << "# schema: llp-inflation-v1\n";
  out << "conn,cn_county,mn_county,cn_site,mn_site,direct_ms,tree_ms,tree_path_ms,"
         "centralized_ms,lisp_ms,infl_tree,infl_centralized,infl_lisp\n";
  using exp_detail::fmt;
  for (const InflationRecord& r : s.records)
    out << r.conn << ',' << r.cn_county << ',' << r.mn_county << ',' << r.cn_site << ','
        << r.mn_site << ',' << fmt(r.direct) << ',' << fmt(r.tree_csr) << ','
        << fmt(r.tree_path) << ',' << fmt(r.centralized) << ',' << fmt(r.lisp) << ','
        << fmt(r.infl(r.tree_csr)) << ',' << fmt(r.infl(r.centralized)) << ','
        << fmt(r.infl(r.lisp)) << '\n';
}

inline void write_memory_csv(const MemorySection& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << "# schema: llp-memory-v1\n";
  out << "gip,leaf,depth,tree_entries,shortcut_entries,worst_case_entries\n";
  for (const MemoryRecord& r : s.records)
    out << r.gip << ',' << r.leaf << ',' << r.depth << ',' << r.tree_entries << ','
        << r.shortcut_entries << ',' << s.worst_case_entries << '\n';
}

inline void write_update_csv(const UpdateSection& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << "# schema: llp-update-v1\n";
  out << "move,gip,from_leaf,to_leaf,attach_direct_ms,llp_disruption_ms,"
         "lisp_disruption_ms,nodes_mapping,nodes_shortcut,nodes_count_refresh\n";
  using exp_detail::fmt;
  for (const UpdateRecord& r : s.records)
    out << r.move << ',' << r.gip << ',' << r.from_leaf << ',' << r.to_leaf << ','
        << fmt(r.attach_direct) << ',' << fmt(r.llp_disruption) << ','
        << fmt(r.lisp_disruption) << ',' << r.nodes_mapping << ',' << r.nodes_shortcut
        << ',' << r.nodes_count << '\n';
}

/// CDF rows per scheme (sorted latency, cumulative fraction), plot-ready.
inline void write_cdf_csv(const InflationSection& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << "# schema: llp-cdf-v1\n";
  out << "scheme,latency_ms,cum_fraction\n";
  using exp_detail::fmt;
  const auto emit = [&](const char* scheme, std::vector<double> values) {
    std::sort(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i)
      out << scheme << ',' << fmt(values[i]) << ','
          << fmt(static_cast<double>(i + 1) / static_cast<double>(values.size())) << '\n';
  };
  std::vector<double> direct, tree, centralized, lisp;
  for (const InflationRecord& r : s.records) {
    direct.push_back(r.direct);
    tree.push_back(r.tree_csr);
    centralized.push_back(r.centralized);
    lisp.push_back(r.lisp);
  }
  if (direct.empty()) return;
  emit("direct", direct);
  emit("tree", tree);
  emit("centralized", centralized);
  emit("lisp", lisp);
}

}  // namespace llp
