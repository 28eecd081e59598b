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
#include <cmath>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "llp/common.hpp"
#include "llp/log.hpp"
#include "llp/metric_graph.hpp"
#include "llp/tree.hpp"

namespace llp {

/// Overlay-over-direct latency ratio minus one. Non-negative because every
/// overlay segment is an underlay path and the metric is triangular.
inline double latency_inflation(const LlpTree& tree, const MetricGraph& graph, int u,
                                int v) {
  if (u == v) throw InputError("latency_inflation: undefined for identical sites");
  const double direct = graph.latency(u, v);
  if (!(direct > 0.0))
    throw InputError("latency_inflation: zero direct latency between distinct sites");
  return tree.tree_path_latency(graph, u, v) / direct - 1.0;
}

// ---------------------------------------------------------------------------
// Weighted center reset

namespace opt_detail {

/// Weighted-average intra-cluster latency for candidate center i, plus the
/// latency to the parent center (skipped for the root). The denominator
/// sums the weights of every member including i.
inline double center_score(const MetricGraph& graph, const std::vector<int>& members,
                           int candidate, int parent_center) {
  double num = 0.0;
  double den = 0.0;
  for (const int j : members) {
    den += graph.site(j).weight;
    if (j != candidate) num += graph.site(j).weight * graph.latency(candidate, j);
  }
  double score = num / den;
  if (parent_center >= 0) score += graph.latency(candidate, parent_center);
  return score;
}

inline double center_score_excl(const MetricGraph& graph, const std::vector<int>& members,
                                int candidate, int parent_center) {
  double num = 0.0;
  double den = 0.0;
  for (const int j : members) {
    if (j == candidate) continue;
    den += graph.site(j).weight;
    num += graph.site(j).weight * graph.latency(candidate, j);
  }
  double score = den > 0.0 ? num / den : 0.0;
  if (parent_center >= 0) score += graph.latency(candidate, parent_center);
  return score;
}

inline std::vector<int> pi_positions(const std::vector<int>& pi, int n) {
  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < static_cast<int>(pi.size()); ++i)
    pos[static_cast<std::size_t>(pi[static_cast<std::size_t>(i)])] = i;
  return pos;
}

}  // namespace opt_detail

/// Re-selects every cluster center to balance weighted intra-cluster
/// latency against the latency to the parent center. Runs root to leaves
/// so that each cluster sees its parent's final center. Tree structure is
/// untouched; centers and edge weights change.
inline LlpTree reset_centers(const LlpTree& input, const MetricGraph& graph) {
  LlpTree tree = input;
  const std::vector<int> pi_pos = opt_detail::pi_positions(tree.pi, graph.size());

  // preorder node array: parents are final before their children run
  for (LlpNode& n : tree.nodes) {
    const int parent_center = n.parent >= 0 ? tree.node(n.parent).center : -1;
    int best = n.center;
    double best_score = opt_detail::center_score(graph, n.members, best, parent_center);
    for (const int cand : n.members) {
      if (cand == best) continue;
      const double score = opt_detail::center_score(graph, n.members, cand, parent_center);
      if (approx_eq(score, best_score)) {
        if (pi_pos[static_cast<std::size_t>(cand)] < pi_pos[static_cast<std::size_t>(best)])
          best = cand;
      } else if (score < best_score) {
        best = cand;
        best_score = score;
      }
    }
    if (log_level() >= LogLevel::kDebug && best != n.center) {
      log_debug("reset_centers: node " + std::to_string(n.id) + " center " +
                std::to_string(n.center) + " -> " + std::to_string(best) +
                " score(incl)=" + std::to_string(best_score) + " score(excl)=" +
                std::to_string(opt_detail::center_score_excl(graph, n.members, best,
                                                             parent_center)));
    }
    n.center = best;
  }
  // shortcut latencies track their endpoint centers
  for (Shortcut& s : tree.shortcuts)
    s.latency = graph.latency(tree.node(s.from).center, tree.node(s.to).center);
  tree.rebuild_derived(graph);
  return tree;
}

// ---------------------------------------------------------------------------
// Detour stretching

namespace opt_detail {

inline void collect_centers(const ClusterNode& c, std::set<int>& out) {
  out.insert(c.center);
  for (const ClusterNode& ch : c.children) collect_centers(ch, out);
}

struct DetourHit {
  ClusterNode* child = nullptr;
  int new_center = -1;
};

/// First (preorder) child cluster whose underlay path to its parent's
/// center passes through a member of the child that centers some other
/// cluster. Interior path nodes are scanned in path order.
inline bool find_detour(ClusterNode& parent, const MetricGraph& graph,
                        const std::set<int>& centers,
                        const std::set<std::vector<int>>& frozen, DetourHit& hit) {
  for (ClusterNode& child : parent.children) {
    if (!frozen.count(child.members)) {
      const std::vector<int> path = graph.underlay_path(child.center, parent.center);
      for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const int n3 = path[i];
        if (n3 == child.center || !centers.count(n3)) continue;
        if (!std::binary_search(child.members.begin(), child.members.end(), n3)) continue;
        hit.child = &child;
        hit.new_center = n3;
        return true;
      }
    }
    if (find_detour(child, graph, centers, frozen, hit)) return true;
  }
  return false;
}

}  // namespace opt_detail

/// Eliminates overlay edges whose underlay path doubles back through a
/// center inside the child cluster: the child adopts that center and its
/// subtree is rebuilt with HCS. Repeats to a fixed point, capped at 50
/// rounds; a cluster switched once in a round is left alone until the
/// next round so two candidates cannot feed each other forever.
inline LlpTree stretch_detours(const LlpTree& input, const MetricGraph& graph) {
  ClusterNode root = to_cluster_tree(input);
  const double d_root = std::max(graph.diameter(), input.params.lt);
  const double alpha = input.params.alpha;
  const double lt = input.params.lt;

  for (int round = 0; round < 50; ++round) {
    std::set<std::vector<int>> switched_this_round;
    bool progress = false;
    while (true) {
      std::set<int> centers;
      opt_detail::collect_centers(root, centers);
      opt_detail::DetourHit hit;
      if (!opt_detail::find_detour(root, graph, centers, switched_this_round, hit))
        break;
      ClusterNode& c1 = *hit.child;
      c1.center = hit.new_center;
      const double d_here = d_root / std::pow(alpha, c1.rec_depth);
      ClusterNode rebuilt =
          hcs(c1.members, d_here, graph, lt, input.pi, alpha, c1.rec_depth);
      c1.children = std::move(rebuilt.children);
      switched_this_round.insert(c1.members);
      progress = true;
    }
    if (!progress) break;
  }
  return materialize_tree(root, graph, input.params, input.pi);
}

// ---------------------------------------------------------------------------
// Shortcut augmentation

struct PolicyRange {
  double lo = 0.0;
  double hi = 0.0;
  double epsilon = 0.0;
};

/// Contiguous latency ranges with nondecreasing inflation bounds.
struct InflationPolicy {
  std::vector<PolicyRange> ranges;

  void validate() const {
    if (ranges.empty()) throw InputError("policy: no ranges");
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      if (!(ranges[i].hi > ranges[i].lo)) throw InputError("policy: empty range");
      if (ranges[i].epsilon < 0.0) throw InputError("policy: negative epsilon");
      if (i > 0) {
        if (!approx_eq(ranges[i].lo, ranges[i - 1].hi))
          throw InputError("policy: ranges not contiguous");
        if (approx_lt(ranges[i].epsilon, ranges[i - 1].epsilon))
          throw InputError("policy: epsilons must be nondecreasing");
      }
    }
  }
};

/// Power-of-two latency ranges from the smallest positive latency up to
/// the diameter. A range entirely under `eps_cutoff_ms` takes the tight
/// bound, everything else the loose one.
inline InflationPolicy default_policy(const MetricGraph& graph, double eps_low = 0.1,
                                      double eps_high = 1.0,
                                      double eps_cutoff_ms = 10.0) {
  InflationPolicy policy;
  const double d = graph.min_positive_latency();
  const double diam = graph.diameter();
  if (!std::isfinite(d) || diam <= 0.0) {
    policy.ranges.push_back(PolicyRange{0.0, 1.0, eps_high});
    return policy;
  }
  double lo = d;
  while (true) {
    const double hi = lo * 2.0;
    PolicyRange r{lo, hi, hi <= eps_cutoff_ms ? eps_low : eps_high};
    policy.ranges.push_back(r);
    if (approx_leq(diam, hi)) break;
    lo = hi;
  }
  return policy;
}

/// Greedy shortcut augmentation. Ranges are processed tightest first; in
/// each range, ordered leaf pairs still violating its bound get the
/// shortcut from the highest usable node on the source's upward path.
/// Post-condition: every ordered leaf pair meets the bound of its range.
inline LlpTree augment_shortcuts(const LlpTree& input, const MetricGraph& graph,
                                 const InflationPolicy& policy) {
  policy.validate();
  LlpTree tree = input;
  const std::vector<int> leaves = tree.leaf_ids();

  const auto pair_distance = [&](int a, int b) {
    return graph.latency(tree.node(a).center, tree.node(b).center);
  };

  for (std::size_t ri = 0; ri < policy.ranges.size(); ++ri) {
    const PolicyRange& range = policy.ranges[ri];
    const bool last = ri + 1 == policy.ranges.size();
    const auto in_range = [&](double d) {
      if (!approx_leq(range.lo, d)) return false;
      return last ? approx_leq(d, range.hi) : approx_lt(d, range.hi);
    };

    // worst current inflation first; ids break ties for determinism
    std::vector<std::tuple<double, int, int, double>> candidates;
    for (const int a : leaves)
      for (const int b : leaves) {
        if (a == b) continue;
        const double d = pair_distance(a, b);
        if (!(d > 0.0) || !in_range(d)) continue;
        const double li = tree.node_path_latency(a, b) / d - 1.0;
        if (approx_leq(li, range.epsilon)) continue;
        candidates.emplace_back(-li, a, b, d);
      }
    std::sort(candidates.begin(), candidates.end());

    for (const auto& [neg_li, a, b, d] : candidates) {
      if (approx_leq(tree.node_path_latency(a, b) / d - 1.0, range.epsilon))
        continue;  // an earlier shortcut already fixed this pair

      // ascent nodes strictly below the common ancestor, leaf first
      const int w = tree.lca(a, b);
      std::vector<int> ups;
      std::vector<double> ascent;
      double acc = 0.0;
      for (int cur = a; cur != w; cur = tree.node(cur).parent) {
        ups.push_back(cur);
        ascent.push_back(acc);
        acc += tree.node(cur).parent_latency;
      }
      for (std::size_t k = ups.size(); k-- > 0;) {
        const int u_prime = ups[k];
        const double jump = graph.latency(tree.node(u_prime).center, tree.node(b).center);
        const double bypass = ascent[k] + jump;
        if (approx_leq(bypass / d - 1.0, range.epsilon)) {
          tree.add_shortcut(Shortcut{u_prime, b, jump});
          break;
        }
      }
    }
  }
  return tree;
}

/// Scans every ordered leaf pair against the policy. Empty result means
/// the augmented tree honors all its bounds.
inline std::vector<std::string> check_policy(const LlpTree& tree, const MetricGraph& graph,
                                             const InflationPolicy& policy) {
  std::vector<std::string> bad;
  const std::vector<int> leaves = tree.leaf_ids();
  for (const int a : leaves)
    for (const int b : leaves) {
      if (a == b) continue;
      const double d = graph.latency(tree.node(a).center, tree.node(b).center);
      if (!(d > 0.0)) continue;
      for (std::size_t ri = 0; ri < policy.ranges.size(); ++ri) {
        const PolicyRange& r = policy.ranges[ri];
        const bool last = ri + 1 == policy.ranges.size();
        const bool inside =
            approx_leq(r.lo, d) && (last ? approx_leq(d, r.hi) : approx_lt(d, r.hi));
        if (!inside) continue;
        const double li = tree.node_path_latency(a, b) / d - 1.0;
        if (!approx_leq(li, r.epsilon))
          bad.push_back("leaf pair (" + std::to_string(a) + "," + std::to_string(b) +
                        ") inflation " + std::to_string(li) + " exceeds " +
                        std::to_string(r.epsilon));
        break;
      }
    }
  return bad;
}

}  // namespace llp
