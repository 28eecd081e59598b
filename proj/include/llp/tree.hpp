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
#include <map>
#include <set>
#include <string>
#include <vector>

#include "llp/common.hpp"
#include "llp/hcs.hpp"
#include "llp/metric_graph.hpp"

namespace llp {

/// Directed overlay edge that lets a CSR leave the tree early: packets for
/// GIPs located at leaf `to` jump straight there upon reaching `from`.
struct Shortcut {
  int from = -1;
  int to = -1;  // always a leaf logical node
  double latency = 0.0;

  friend bool operator<(const Shortcut& a, const Shortcut& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  }
  friend bool operator==(const Shortcut& a, const Shortcut& b) {
    return a.from == b.from && a.to == b.to;
  }
};

/// One logical overlay node. A physical site may center several nested
/// clusters; each occurrence is its own logical node.
struct LlpNode {
  int id = 0;
  int parent = -1;  // -1 at the root
  std::vector<int> children;
  int center = -1;           // site id hosting this logical node
  int level = 0;             // leaves 0, parents above
  int depth = 0;             // edges from the root
  int rec_depth = 0;         // recursion depth of the originating cluster
  double parent_latency = 0.0;
  std::vector<int> members;  // site ids of the cluster, ascending

  bool is_leaf() const { return children.empty(); }
};

class LlpTree {
 public:
  HcsParams params;
  std::vector<int> pi;           // permutation used for every tie-break
  std::vector<LlpNode> nodes;    // preorder: parents precede children
  std::vector<Shortcut> shortcuts;
  int root = 0;

  int node_count() const { return static_cast<int>(nodes.size()); }

  const LlpNode& node(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
  LlpNode& node(int id) { return nodes.at(static_cast<std::size_t>(id)); }

  bool is_leaf(int id) const { return node(id).is_leaf(); }

  int leaf_of_site(int site) const {
    return leaf_of_site_.at(static_cast<std::size_t>(site));
  }

  /// Logical nodes whose center is this site (possibly several levels).
  const std::vector<int>& nodes_centered_at(int site) const {
    static const std::vector<int> kEmpty;
    const auto it = centers_at_.find(site);
    return it == centers_at_.end() ? kEmpty : it->second;
  }

  std::vector<int> leaf_ids() const {
    std::vector<int> out;
    for (const LlpNode& n : nodes)
      if (n.is_leaf()) out.push_back(n.id);
    return out;
  }

  /// Maximum node depth (edges from the root).
  int depth() const {
    int h = 0;
    for (const LlpNode& n : nodes) h = std::max(h, n.depth);
    return h;
  }

  std::vector<int> path_to_root(int id) const {
    std::vector<int> path;
    for (int cur = id; cur != -1; cur = node(cur).parent) path.push_back(cur);
    return path;
  }

  int lca(int a, int b) const {
    while (a != b) {
      if (node(a).depth >= node(b).depth)
        a = node(a).parent;
      else
        b = node(b).parent;
    }
    return a;
  }

  /// Latency of the unique tree path between two logical nodes.
  double walk_latency(int a, int b) const {
    const int w = lca(a, b);
    double total = 0.0;
    for (int cur = a; cur != w; cur = node(cur).parent) total += node(cur).parent_latency;
    for (int cur = b; cur != w; cur = node(cur).parent) total += node(cur).parent_latency;
    return total;
  }

  const std::vector<std::pair<int, double>>& shortcuts_from(int id) const {
    static const std::vector<std::pair<int, double>> kEmpty;
    const auto it = shortcut_out_.find(id);
    return it == shortcut_out_.end() ? kEmpty : it->second;
  }

  /// Sources of shortcuts into leaf `v` (the set S_v).
  std::vector<int> shortcut_sources(int v) const {
    std::vector<int> out;
    for (const Shortcut& s : shortcuts)
      if (s.to == v) out.push_back(s.from);
    return out;
  }

  /// Best latency between two logical nodes: the tree path, possibly cut
  /// short by a shortcut taken on the ascent toward the common ancestor.
  double node_path_latency(int a, int b) const {
    double best = walk_latency(a, b);
    if (!is_leaf(b) || shortcuts.empty()) return best;
    const int w = lca(a, b);
    double ascent = 0.0;
    for (int cur = a; cur != w; cur = node(cur).parent) {
      for (const auto& [to, lat] : shortcuts_from(cur))
        if (to == b) best = std::min(best, ascent + lat);
      ascent += node(cur).parent_latency;
    }
    return best;
  }

  /// Overlay path latency between two physical sites. A site that centers
  /// logical nodes enters the tree there at zero cost; any site may enter
  /// via its containing leaf with an underlay access leg.
  double tree_path_latency(const MetricGraph& graph, int u, int v) const {
    if (u < 0 || u >= graph.size() || v < 0 || v >= graph.size())
      throw InputError("tree_path_latency: unknown site id");
    if (u == v) return 0.0;
    const auto entries = [&](int site) {
      std::vector<std::pair<int, double>> out;
      for (const int id : nodes_centered_at(site)) out.emplace_back(id, 0.0);
      const int leaf = leaf_of_site(site);
      if (node(leaf).center != site)
        out.emplace_back(leaf, graph.latency(site, node(leaf).center));
      return out;
    };
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [a, leg_u] : entries(u))
      for (const auto& [b, leg_v] : entries(v))
        best = std::min(best, leg_u + node_path_latency(a, b) + leg_v);
    return best;
  }

  void add_shortcut(const Shortcut& s) {
    if (std::find(shortcuts.begin(), shortcuts.end(), s) != shortcuts.end()) return;
    shortcuts.push_back(s);
    std::sort(shortcuts.begin(), shortcuts.end());
    index_shortcuts();
  }

  /// Refreshes every derived index and recomputed field (children lists,
  /// depths, height-based levels, edge latencies, site maps). Call after
  /// any structural or center mutation.
  void rebuild_derived(const MetricGraph& graph) {
    for (LlpNode& n : nodes) n.children.clear();
    for (const LlpNode& n : nodes)
      if (n.parent >= 0) node(n.parent).children.push_back(n.id);
    node(root).depth = 0;
    node(root).parent_latency = 0.0;
    // preorder array: parents precede children, one forward pass settles depth
    for (LlpNode& n : nodes) {
      if (n.parent >= 0) {
        n.depth = node(n.parent).depth + 1;
        n.parent_latency = graph.latency(node(n.parent).center, n.center);
      }
    }
    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
      int lvl = 0;
      for (const int c : it->children) lvl = std::max(lvl, node(c).level + 1);
      it->level = lvl;
    }
    leaf_of_site_.assign(static_cast<std::size_t>(graph.size()), -1);
    centers_at_.clear();
    for (const LlpNode& n : nodes) {
      centers_at_[n.center].push_back(n.id);
      if (n.is_leaf())
        for (const int m : n.members)
          if (m >= 0 && m < graph.size()) leaf_of_site_[static_cast<std::size_t>(m)] = n.id;
    }
    index_shortcuts();
  }

 private:
  void index_shortcuts() {
    shortcut_out_.clear();
    for (const Shortcut& s : shortcuts) shortcut_out_[s.from].emplace_back(s.to, s.latency);
  }

  std::vector<int> leaf_of_site_;
  std::map<int, std::vector<int>> centers_at_;
  std::map<int, std::vector<std::pair<int, double>>> shortcut_out_;
};

namespace tree_detail {

inline void materialize_rec(const ClusterNode& cluster, int parent, LlpTree& tree) {
  const int id = tree.node_count();
  LlpNode n;
  n.id = id;
  n.parent = parent;
  n.center = cluster.center;
  n.rec_depth = cluster.rec_depth;
  n.members = cluster.members;
  tree.nodes.push_back(std::move(n));
  for (const ClusterNode& c : cluster.children) materialize_rec(c, id, tree);
}

}  // namespace tree_detail

/// Turns the cluster hierarchy into the logical overlay tree: one logical
/// node per cluster, parent-child edges weighted by the underlay latency
/// between the two centers (zero when one site centers both).
inline LlpTree materialize_tree(const ClusterNode& cluster_root, const MetricGraph& graph,
                                const HcsParams& params, const std::vector<int>& pi) {
  LlpTree tree;
  tree.params = params;
  tree.pi = pi;
  tree.root = 0;
  tree_detail::materialize_rec(cluster_root, -1, tree);
  tree.rebuild_derived(graph);
  return tree;
}

/// Cluster hierarchy view of a materialized tree (centers preserved).
inline ClusterNode to_cluster_tree(const LlpTree& tree, int id = -1) {
  const LlpNode& n = tree.node(id < 0 ? tree.root : id);
  ClusterNode c;
  c.members = n.members;
  c.center = n.center;
  c.rec_depth = n.rec_depth;
  for (const int child : n.children) c.children.push_back(to_cluster_tree(tree, child));
  return c;
}

/// Convenience: permutation, HCS, materialization in one step.
inline LlpTree build_tree(const MetricGraph& graph, const HcsParams& params) {
  const std::vector<int> pi = make_permutation(graph.size(), params.seed);
  return materialize_tree(hcs_build(graph, params, pi), graph, params, pi);
}

// ---------------------------------------------------------------------------
// Structural checks. Empty result means the tree is sound.

inline std::vector<std::string> validate_tree(const LlpTree& tree,
                                              const MetricGraph& graph) {
  std::vector<std::string> bad;
  const auto complain = [&bad](const std::string& msg) { bad.push_back(msg); };

  int roots = 0;
  for (const LlpNode& n : tree.nodes) {
    if (n.parent == -1) ++roots;
    if (n.id != static_cast<int>(&n - tree.nodes.data()))
      complain("node id mismatch at " + std::to_string(n.id));
    if (n.members.empty()) complain("node " + std::to_string(n.id) + " has no members");
    if (!std::binary_search(n.members.begin(), n.members.end(), n.center))
      complain("node " + std::to_string(n.id) + " center outside its members");
  }
  if (roots != 1) complain("tree must have exactly one root, found " + std::to_string(roots));

  // leaves partition the site set
  std::vector<int> owner(static_cast<std::size_t>(graph.size()), -1);
  for (const LlpNode& n : tree.nodes) {
    if (!n.is_leaf()) continue;
    for (const int m : n.members) {
      if (m < 0 || m >= graph.size()) {
        complain("leaf " + std::to_string(n.id) + " references unknown site");
        continue;
      }
      if (owner[static_cast<std::size_t>(m)] != -1)
        complain("site " + std::to_string(m) + " belongs to two leaves");
      owner[static_cast<std::size_t>(m)] = n.id;
    }
  }
  for (int s = 0; s < graph.size(); ++s)
    if (owner[static_cast<std::size_t>(s)] == -1)
      complain("site " + std::to_string(s) + " not covered by any leaf");

  // internal members are the union of their children's members
  for (const LlpNode& n : tree.nodes) {
    if (n.is_leaf()) continue;
    std::vector<int> merged;
    for (const int c : n.children) {
      const auto& cm = tree.node(c).members;
      merged.insert(merged.end(), cm.begin(), cm.end());
    }
    std::sort(merged.begin(), merged.end());
    if (merged != n.members)
      complain("node " + std::to_string(n.id) + " members differ from children union");
  }

  // edge latencies mirror the metric
  for (const LlpNode& n : tree.nodes) {
    if (n.parent < 0) continue;
    const double expect = graph.latency(tree.node(n.parent).center, n.center);
    if (!approx_eq(n.parent_latency, expect))
      complain("edge to node " + std::to_string(n.id) + " latency drifted from the metric");
  }

  for (const Shortcut& s : tree.shortcuts) {
    if (s.from < 0 || s.from >= tree.node_count() || s.to < 0 || s.to >= tree.node_count()) {
      complain("shortcut endpoint out of range");
      continue;
    }
    if (!tree.is_leaf(s.to)) complain("shortcut target " + std::to_string(s.to) + " is not a leaf");
    const std::vector<int> up = tree.path_to_root(s.to);
    if (std::find(up.begin(), up.end(), s.from) != up.end())
      complain("shortcut from " + std::to_string(s.from) + " lies on its target's root path");
    const double expect = graph.latency(tree.node(s.from).center, tree.node(s.to).center);
    if (!approx_eq(s.latency, expect)) complain("shortcut latency drifted from the metric");
  }
  return bad;
}

/// Claim on tree depth: H never exceeds ceil(log2(D/lt)) + 2 at alpha = 2.
inline bool check_depth_bound(const LlpTree& tree, const MetricGraph& graph) {
  const double d = graph.diameter();
  const double lt = tree.params.lt;
  if (d <= 0.0 || lt <= 0.0) return tree.depth() == 0;
  const double ratio = d / lt;
  const int bound = ratio <= 1.0 ? 2 : static_cast<int>(std::ceil(std::log2(ratio) - 1e-12)) + 2;
  return tree.depth() <= bound;
}

/// Claim on edge latencies: a level-i edge never exceeds lt * 2^i. Levels
/// follow the claim's recursion ladder: its top sits at
/// H = ceil(log2(D/lt)) + 1 and an edge added inside a cluster at
/// recursion depth r carries level H - r. Height-based node levels can sit
/// below that ladder when a branch bottoms out early, which would reject
/// trees the guarantee actually covers.
inline bool check_level_edge_bound(const LlpTree& tree, const MetricGraph& graph,
                                   std::vector<std::string>* violations = nullptr) {
  const double lt = tree.params.lt;
  if (!(lt > 0.0)) return true;
  const double ratio = std::max(graph.diameter() / lt, 1.0);
  const int ladder_top = static_cast<int>(std::ceil(std::log2(ratio) - 1e-12)) + 1;
  bool ok = true;
  for (const LlpNode& n : tree.nodes) {
    if (n.parent < 0) continue;
    const int level = std::max(ladder_top - tree.node(n.parent).rec_depth, 0);
    const double bound = lt * std::pow(2.0, level);
    const double lat = graph.latency(tree.node(n.parent).center, n.center);
    if (!approx_leq(lat, bound)) {
      ok = false;
      if (violations != nullptr)
        violations->push_back("edge (" + std::to_string(n.parent) + "," +
                              std::to_string(n.id) + ") latency " + std::to_string(lat) +
                              " exceeds lt*2^" + std::to_string(level));
    }
  }
  return ok;
}

}  // namespace llp
