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

#include "llp/common.hpp"
#include "llp/metric_graph.hpp"
#include "llp/tree.hpp"

namespace llp {

enum class BaselineKind { kCentralized, kLispMiss };

struct BaselineConfig {
  int anchor_site = 0;  // default: the site hosting the tree root
  BaselineKind kind = BaselineKind::kCentralized;
};

/// Anchor site both comparison systems use: the physical center of the
/// overlay root, typically the latency-central node of the topology.
inline int default_anchor(const LlpTree& tree) { return tree.node(tree.root).center; }

/// Every packet transits the single mobility anchor.
inline double centralized_csr_latency(const MetricGraph& graph, int anchor, int cn,
                                      int mn, double cn_leg = 0.0, double mn_leg = 0.0) {
  return cn_leg + graph.latency(cn, anchor) + graph.latency(anchor, mn) + mn_leg;
}

/// First packet under a cache miss: the ingress round-trips a map request
/// to the server, then forwards on the direct path.
inline double lisp_miss_csr_latency(const MetricGraph& graph, int mapserver, int cn,
                                    int mn, double cn_leg = 0.0, double mn_leg = 0.0) {
  return cn_leg + 2.0 * graph.latency(cn, mapserver) + graph.latency(cn, mn) + mn_leg;
}

/// LISP mobility: register with the new ETR and unregister with the old
/// one (in parallel), the old ETR notifies the ITR, and the ITR round
/// trips a query to the map server. Discovery time comes on top.
inline double lisp_update_disruption(const MetricGraph& graph, int mn_site, int old_etr,
                                     int new_etr, int itr_site, int mapserver) {
  const double attach = std::max(graph.latency(mn_site, new_etr),
                                 graph.latency(mn_site, old_etr));
  return kMobilityDiscoveryMs + attach + graph.latency(old_etr, itr_site) +
         2.0 * graph.latency(itr_site, mapserver);
}

/// Full-replication worst case: a mapping cached at every overlay node.
inline int lisp_worst_case_entries(const LlpTree& tree) { return tree.node_count(); }

}  // namespace llp
