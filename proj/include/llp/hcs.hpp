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

#include <algorithm>
#include <cstdint>
#include <vector>

#include "llp/common.hpp"
#include "llp/metric_graph.hpp"
#include "llp/rng.hpp"

namespace llp {

struct HcsParams {
  double lt = 2.0;      // acceptable cluster latency threshold, ms
  double alpha = 2.0;   // threshold decay per recursion level
  std::uint64_t seed = 0;
};

/// One cluster of the hierarchical decomposition.
struct ClusterNode {
  std::vector<int> members;  // site ids, ascending
  int center = -1;           // member with the least total latency, ties by pi
  double clt = 0.0;          // latency threshold in force when it was formed
  int rec_depth = 0;         // 0 at the root call
  std::vector<ClusterNode> children;

  bool is_leaf() const { return children.empty(); }
};

/// True iff the latency diameter of `members` is within `lt`.
inline bool bounded(const std::vector<int>& members, const MetricGraph& graph,
                    double lt) {
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      if (!approx_leq(graph.latency(members[i], members[j]), lt)) return false;
  return true;
}

namespace hcs_detail {

inline std::vector<int> pi_positions(const std::vector<int>& pi, int n) {
  if (static_cast<int>(pi.size()) != n)
    throw InputError("pi must be a permutation of all site ids");
  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int site = pi[static_cast<std::size_t>(i)];
    if (site < 0 || site >= n || pos[static_cast<std::size_t>(site)] != -1)
      throw InputError("pi must be a permutation of all site ids");
    pos[static_cast<std::size_t>(site)] = i;
  }
  return pos;
}

/// Member minimizing the total latency to the rest of the cluster.
/// Near-equal totals tie-break on pi position so the pipeline stays a
/// pure function of the seed.
inline int central_member(const std::vector<int>& members, const MetricGraph& graph,
                          const std::vector<int>& pi_pos) {
  int best = members.front();
  double best_total = 0.0;
  for (const int j : members) best_total += graph.latency(best, j);
  for (std::size_t k = 1; k < members.size(); ++k) {
    const int cand = members[k];
    double total = 0.0;
    for (const int j : members) total += graph.latency(cand, j);
    if (approx_eq(total, best_total)) {
      if (pi_pos[static_cast<std::size_t>(cand)] < pi_pos[static_cast<std::size_t>(best)])
        best = cand;
    } else if (total < best_total) {
      best = cand;
      best_total = total;
    }
  }
  return best;
}

}  // namespace hcs_detail

/// Partitions `members` by gathering, in pi order, every unresolved member
/// within `clt` of the gathering node. Output order is formation order.
inline std::vector<ClusterNode> random_clustering(const std::vector<int>& members,
                                                  double clt,
                                                  const MetricGraph& graph,
                                                  const std::vector<int>& pi) {
  if (!(clt > 0.0)) throw InputError("random_clustering: clt must be positive");
  const std::vector<int> pi_pos = hcs_detail::pi_positions(pi, graph.size());
  std::vector<bool> in_set(static_cast<std::size_t>(graph.size()), false);
  for (const int m : members) in_set[static_cast<std::size_t>(m)] = true;
  std::vector<bool> resolved(static_cast<std::size_t>(graph.size()), false);

  std::vector<ClusterNode> clusters;
  for (const int v : pi) {
    if (!in_set[static_cast<std::size_t>(v)] || resolved[static_cast<std::size_t>(v)])
      continue;
    ClusterNode cluster;
    cluster.clt = clt;
    for (const int m : members) {
      if (resolved[static_cast<std::size_t>(m)]) continue;
      if (approx_leq(graph.latency(v, m), clt)) {
        cluster.members.push_back(m);
        resolved[static_cast<std::size_t>(m)] = true;
      }
    }
    std::sort(cluster.members.begin(), cluster.members.end());
    cluster.center = hcs_detail::central_member(cluster.members, graph, pi_pos);
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

/// Hierarchical Cluster Selection. Returns a leaf when the member set is
/// already bounded by `lt`; otherwise clusters at threshold d/alpha and
/// recurses into each cluster with that same reduced threshold.
inline ClusterNode hcs(const std::vector<int>& members, double d,
                       const MetricGraph& graph, double lt,
                       const std::vector<int>& pi, double alpha = 2.0,
                       int rec_depth = 0) {
  if (members.empty()) throw InputError("hcs: empty member set");
  if (!(d > 0.0)) throw InputError("hcs: d must be positive");
  if (!(alpha > 1.0)) throw InputError("hcs: alpha must exceed 1");

  ClusterNode node;
  node.members = members;
  std::sort(node.members.begin(), node.members.end());
  node.clt = d;
  node.rec_depth = rec_depth;
  node.center = hcs_detail::central_member(
      node.members, graph, hcs_detail::pi_positions(pi, graph.size()));

  if (bounded(node.members, graph, lt)) return node;

  for (ClusterNode& c : random_clustering(node.members, d / alpha, graph, pi)) {
    node.children.push_back(
        hcs(c.members, d / alpha, graph, lt, pi, alpha, rec_depth + 1));
  }
  return node;
}

/// Full build from parameters: derives pi from the seed and starts the
/// recursion at the latency diameter of the metric.
inline ClusterNode hcs_build(const MetricGraph& graph, const HcsParams& params,
                             const std::vector<int>& pi) {
  std::vector<int> all(static_cast<std::size_t>(graph.size()));
  std::iota(all.begin(), all.end(), 0);
  const double d = std::max(graph.diameter(), params.lt);
  return hcs(all, d, graph, params.lt, pi, params.alpha);
}

}  // namespace llp
