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

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "llp/common.hpp"
#include "llp/metric_graph.hpp"
#include "llp/tree.hpp"

namespace llp {

/// Fixed identifier of a mobile node, stable across every move.
struct Gip {
  std::uint64_t value = 0;
  auto operator<=>(const Gip&) const = default;
};

/// Access network tag. Free-form so deployments can add their own kinds.
using Access = std::string;

namespace access {
inline const Access kFiveG = "5G";
inline const Access kWiFi = "WiFi";
inline const Access kEthernet = "Ethernet";
}  // namespace access

/// The locator side of one (gip, access) attachment.
struct AccessBinding {
  Gip gip;
  Access access;
  std::string pip;            // locator assigned by the access network
  int leaf = -1;              // serving leaf logical node
  double attach_latency = 0;  // MN <-> leaf, one way, ms
};

enum class Mutation {
  kPipAdd,
  kPipUpdate,
  kPipDelete,
  kChildAdd,
  kChildUpdate,
  kChildDelete,
  kCountRefresh,
  kShortcutAdd,
  kShortcutDelete,
};

inline const char* mutation_name(Mutation m) {
  switch (m) {
    case Mutation::kPipAdd: return "pip_add";
    case Mutation::kPipUpdate: return "pip_update";
    case Mutation::kPipDelete: return "pip_delete";
    case Mutation::kChildAdd: return "child_add";
    case Mutation::kChildUpdate: return "child_update";
    case Mutation::kChildDelete: return "child_delete";
    case Mutation::kCountRefresh: return "count_refresh";
    case Mutation::kShortcutAdd: return "shortcut_add";
    case Mutation::kShortcutDelete: return "shortcut_delete";
  }
  return "?";
}

inline bool is_mapping_mutation(Mutation m) {
  switch (m) {
    case Mutation::kPipAdd:
    case Mutation::kPipUpdate:
    case Mutation::kPipDelete:
    case Mutation::kChildAdd:
    case Mutation::kChildUpdate:
    case Mutation::kChildDelete:
      return true;
    default:
      return false;
  }
}

/// Protocol message between logical nodes; -1 stands for the mobile node.
struct Message {
  int from = -1;
  int to = -1;
  double latency = 0.0;
};

/// Record of one location update, move or deregistration.
struct UpdateTrace {
  std::vector<std::pair<int, Mutation>> nodes_touched;
  std::vector<Message> messages;
  double ack_latency = 0.0;
  // Discovery plus endpoint exchange; the tree update runs in parallel and
  // does not gate established connections. Callers with a live peer add
  // the one-way direct latency to kMobilityDiscoveryMs.
  double disruption = kMobilityDiscoveryMs;
  int terminal_node = -1;
  bool no_op = false;

  int distinct_nodes(const std::function<bool(Mutation)>& want) const {
    std::set<int> ids;
    for (const auto& [node, m] : nodes_touched)
      if (want(m)) ids.insert(node);
    return static_cast<int>(ids.size());
  }
  /// Nodes whose GIP->PIP or GIP->child state changed.
  int mapping_nodes() const {
    return distinct_nodes(is_mapping_mutation);
  }
  /// Nodes touched only to maintain shortcut forwarding entries.
  int shortcut_nodes() const {
    std::set<int> mapping;
    for (const auto& [node, m] : nodes_touched)
      if (is_mapping_mutation(m)) mapping.insert(node);
    std::set<int> extra;
    for (const auto& [node, m] : nodes_touched)
      if ((m == Mutation::kShortcutAdd || m == Mutation::kShortcutDelete) &&
          !mapping.count(node))
        extra.insert(node);
    return static_cast<int>(extra.size());
  }
  int count_refresh_nodes() const {
    std::set<int> mapping;
    for (const auto& [node, m] : nodes_touched)
      if (m != Mutation::kCountRefresh) mapping.insert(node);
    std::set<int> extra;
    for (const auto& [node, m] : nodes_touched)
      if (m == Mutation::kCountRefresh && !mapping.count(node)) extra.insert(node);
    return static_cast<int>(extra.size());
  }
};

/// One delivered CSR copy.
struct DeliveryCopy {
  Access access;
  double arrival = 0.0;  // CN -> MN accumulated latency for this copy
  int leaf = -1;
};

/// Record of one connection setup request walk.
struct DeliveryTrace {
  int entry_leaf = -1;
  std::vector<std::pair<int, double>> hops;  // (node, arriving message latency)
  std::vector<DeliveryCopy> copies;
  bool delivered = false;

  /// The endpoint accepts the first copy only.
  double setup_latency() const {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const DeliveryCopy& c : copies)
      if (std::isnan(best) || c.arrival < best) best = c.arrival;
    return best;
  }
};

/// Per logical node mapping state.
struct NodeTable {
  std::map<std::pair<Gip, Access>, std::string> leaf_entries;  // leaves only
  std::map<std::pair<Gip, Access>, int> child_entries;         // next hop down
  std::map<Gip, int> total_access_count;
  std::map<Gip, std::set<int>> shortcut_entries;  // jump targets per gip
  std::set<int> sv_set;  // leaves only: nodes holding shortcuts into here

  bool holds_any(const Gip& g) const {
    return holds_mapping(g) || shortcut_entries.count(g) || total_access_count.count(g);
  }
  bool holds_mapping(const Gip& g) const {
    const auto leaf = leaf_entries.lower_bound({g, Access()});
    if (leaf != leaf_entries.end() && leaf->first.first == g) return true;
    const auto child = child_entries.lower_bound({g, Access()});
    return child != child_entries.end() && child->first.first == g;
  }
  bool empty() const {
    return leaf_entries.empty() && child_entries.empty() &&
           total_access_count.empty() && shortcut_entries.empty();
  }
};

struct PlacementReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Post-setup path: traffic leaves the overlay and runs directly between
/// the endpoints, so the cost is one underlay leg plus the MN access leg.
double direct_path_latency(const LlpTree& tree, const MetricGraph& graph, int cn_site,
                           const AccessBinding& binding);

/// Single-writer simulation of the per-node LLP state machines.
class Simulator {
 public:
  Simulator(const LlpTree& tree, const MetricGraph& graph)
      : tree_(&tree), graph_(&graph), tables_(tree.nodes.size()) {
    for (const Shortcut& s : tree.shortcuts)
      tables_[static_cast<std::size_t>(s.to)].sv_set.insert(s.from);
  }

  const LlpTree& tree() const { return *tree_; }
  const MetricGraph& graph() const { return *graph_; }
  const NodeTable& table(int node) const {
    return tables_.at(static_cast<std::size_t>(node));
  }
  const std::map<std::pair<Gip, Access>, AccessBinding>& bindings() const {
    return bindings_;
  }

  /// Anycast attachment: the leaf whose center is latency-closest to the
  /// site, ties to the lower node id.
  int nearest_leaf(int site) const {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const LlpNode& n : tree_->nodes) {
      if (!n.is_leaf()) continue;
      const double d = graph_->latency(site, n.center);
      if (d < best_d) {
        best_d = d;
        best = n.id;
      }
    }
    return best;
  }

  void set_event_log(std::ostream* out) { event_log_ = out; }

  /// Installs the mapping at the leaf and a per-access next-hop pointer at
  /// every ancestor; the last node on the path acknowledges.
  UpdateTrace register_binding(const AccessBinding& b) {
    require_leaf(b.leaf);
    const std::pair<Gip, Access> key{b.gip, b.access};
    UpdateTrace trace;
    const auto existing = bindings_.find(key);
    if (existing != bindings_.end()) {
      if (existing->second.leaf == b.leaf && existing->second.pip == b.pip) {
        existing->second.attach_latency = b.attach_latency;
        trace.no_op = true;
        log_event("register", b.gip, b.access, trace);
        return trace;
      }
      throw InputError("register: binding already exists; use move");
    }

    const bool leaf_had_gip = leaf_holds_gip(b.leaf, b.gip);
    double t = b.attach_latency;
    trace.messages.push_back(Message{-1, b.leaf, b.attach_latency});
    table_mut(b.leaf).leaf_entries[key] = b.pip;
    touch(trace, b.leaf, Mutation::kPipAdd);

    int cur = b.leaf;
    while (tree_->node(cur).parent != -1) {
      const int p = tree_->node(cur).parent;
      const double lat = tree_->node(cur).parent_latency;
      trace.messages.push_back(Message{cur, p, lat});
      t += lat;
      table_mut(p).child_entries[key] = cur;
      touch(trace, p, Mutation::kChildAdd);
      cur = p;
    }
    trace.terminal_node = cur;
    bindings_[key] = b;
    if (!leaf_had_gip) shortcut_install(b.gip, b.leaf, trace);
    refresh_counts(b.gip, trace);
    trace.ack_latency =
        t + graph_->latency(tree_->node(cur).center, tree_->node(b.leaf).center) +
        b.attach_latency;
    log_event("register", b.gip, b.access, trace);
    return trace;
  }

  /// Location update: the new leaf stores the mapping, the update climbs
  /// until it meets the old path, flips the pointer there, and a delete
  /// walks down the stale branch. The new leaf ACKs once the meet node
  /// confirms; the stale-branch cleanup does not gate the ACK.
  UpdateTrace move_binding(const Gip& gip, const Access& acc, int new_leaf,
                           const std::string& new_pip, double new_attach_latency) {
    const std::pair<Gip, Access> key{gip, acc};
    const auto it = bindings_.find(key);
    if (it == bindings_.end()) throw InputError("move: unknown (gip, access)");
    require_leaf(new_leaf);
    UpdateTrace trace;
    AccessBinding binding = it->second;
    const int old_leaf = binding.leaf;

    if (new_leaf == old_leaf) {
      // local PIP refresh
      trace.messages.push_back(Message{-1, new_leaf, new_attach_latency});
      if (binding.pip != new_pip) {
        table_mut(new_leaf).leaf_entries[key] = new_pip;
        touch(trace, new_leaf, Mutation::kPipUpdate);
      } else {
        trace.no_op = true;
      }
      binding.pip = new_pip;
      binding.attach_latency = new_attach_latency;
      bindings_[key] = binding;
      trace.terminal_node = new_leaf;
      trace.ack_latency = 2.0 * new_attach_latency;
      log_event("move", gip, acc, trace);
      return trace;
    }

    const bool new_leaf_had_gip = leaf_holds_gip(new_leaf, gip);
    double up_t = new_attach_latency;
    trace.messages.push_back(Message{-1, new_leaf, new_attach_latency});
    table_mut(new_leaf).leaf_entries[key] = new_pip;
    touch(trace, new_leaf, Mutation::kPipAdd);

    // climb until the old path answers
    int cur = new_leaf;
    int meet = -1;
    int old_child = -1;
    double descent_t = 0.0;
    while (tree_->node(cur).parent != -1) {
      const int p = tree_->node(cur).parent;
      const double lat = tree_->node(cur).parent_latency;
      trace.messages.push_back(Message{cur, p, lat});
      up_t += lat;
      descent_t += lat;
      auto& entries = table_mut(p).child_entries;
      const auto hit = entries.find(key);
      if (hit != entries.end()) {
        old_child = hit->second;
        hit->second = cur;
        touch(trace, p, Mutation::kChildUpdate);
        meet = p;
        break;
      }
      entries[key] = cur;
      touch(trace, p, Mutation::kChildAdd);
      cur = p;
    }
    if (meet == -1)
      throw InvariantError("move: old path missing above the new leaf");

    // stale branch cleanup, meet -> old leaf
    if (old_child == meet) throw InvariantError("move: pointer loop");
    int del_from = meet;
    int del_node = old_child;
    while (true) {
      trace.messages.push_back(Message{
          del_from, del_node,
          graph_->latency(tree_->node(del_from).center, tree_->node(del_node).center)});
      NodeTable& tbl = table_mut(del_node);
      if (tree_->is_leaf(del_node)) {
        tbl.leaf_entries.erase(key);
        touch(trace, del_node, Mutation::kPipDelete);
        drop_count_if_idle(del_node, gip);
        break;
      }
      const auto nxt = tbl.child_entries.find(key);
      if (nxt == tbl.child_entries.end())
        throw InvariantError("move: stale branch broke before its leaf");
      const int next_node = nxt->second;
      tbl.child_entries.erase(nxt);
      touch(trace, del_node, Mutation::kChildDelete);
      drop_count_if_idle(del_node, gip);
      del_from = del_node;
      del_node = next_node;
    }

    // confirmation runs back down the new branch, then the new leaf ACKs
    binding.leaf = new_leaf;
    binding.pip = new_pip;
    binding.attach_latency = new_attach_latency;
    bindings_[key] = binding;
    if (!leaf_holds_gip_via_bindings(old_leaf, gip)) shortcut_withdraw(gip, old_leaf, trace);
    if (!new_leaf_had_gip) shortcut_install(gip, new_leaf, trace);
    refresh_counts(gip, trace);
    trace.terminal_node = new_leaf;
    trace.ack_latency = up_t + descent_t + new_attach_latency;
    log_event("move", gip, acc, trace);
    return trace;
  }

  /// Clean teardown of one (gip, access): mirror of a register.
  UpdateTrace deregister_binding(const Gip& gip, const Access& acc) {
    const std::pair<Gip, Access> key{gip, acc};
    const auto it = bindings_.find(key);
    if (it == bindings_.end()) throw InputError("deregister: unknown (gip, access)");
    UpdateTrace trace;
    const AccessBinding binding = it->second;

    trace.messages.push_back(Message{-1, binding.leaf, binding.attach_latency});
    double t = binding.attach_latency;
    table_mut(binding.leaf).leaf_entries.erase(key);
    touch(trace, binding.leaf, Mutation::kPipDelete);
    int cur = binding.leaf;
    drop_count_if_idle(cur, gip);
    while (tree_->node(cur).parent != -1) {
      const int p = tree_->node(cur).parent;
      const double lat = tree_->node(cur).parent_latency;
      trace.messages.push_back(Message{cur, p, lat});
      t += lat;
      table_mut(p).child_entries.erase(key);
      touch(trace, p, Mutation::kChildDelete);
      drop_count_if_idle(p, gip);
      cur = p;
    }
    trace.terminal_node = cur;
    bindings_.erase(key);
    if (!leaf_holds_gip_via_bindings(binding.leaf, gip))
      shortcut_withdraw(gip, binding.leaf, trace);
    refresh_counts(gip, trace);
    trace.ack_latency = t +
                        graph_->latency(tree_->node(cur).center,
                                        tree_->node(binding.leaf).center) +
                        binding.attach_latency;
    log_event("deregister", gip, acc, trace);
    return trace;
  }

  /// Walks a CSR through the overlay: fan out wherever entries exist,
  /// climb while the unique leaves seen so far are fewer than the total
  /// access count, jump on shortcut entries. One copy per access.
  ///
  /// The count tallies unique leaves, not (leaf, access) pairs, so when
  /// one leaf serves two accesses the walk is satisfied by covering that
  /// single leaf; both copies still go out because delivery resolves
  /// every access entry the leaf holds.
  DeliveryTrace forward_csr(int cn_site, const Gip& gip) const {
    DeliveryTrace trace;
    const int entry = nearest_leaf(cn_site);
    if (entry < 0) return trace;
    trace.entry_leaf = entry;

    std::set<int> covered;
    const auto deliver = [&](int leaf, double at) {
      covered.insert(leaf);
      const auto& entries = table(leaf).leaf_entries;
      for (auto it = entries.lower_bound({gip, Access()});
           it != entries.end() && it->first.first == gip; ++it) {
        const AccessBinding& b = bindings_.at(it->first);
        trace.copies.push_back(
            DeliveryCopy{it->first.second, at + b.attach_latency, leaf});
      }
    };

    // children worth descending into: pointed at for this gip by at least
    // one access whose serving leaf is still uncovered
    const auto pending_children = [&](int node) {
      std::set<int> targets;
      const auto& entries = table(node).child_entries;
      for (auto it = entries.lower_bound({gip, Access()});
           it != entries.end() && it->first.first == gip; ++it) {
        if (covered.count(bindings_.at(it->first).leaf)) continue;
        targets.insert(it->second);
      }
      return targets;
    };

    // Descend along per-access pointers, skipping accesses whose leaf was
    // already served (e.g. via a shortcut jump).
    const std::function<void(int, double)> descend = [&](int node, double at) {
      if (tree_->is_leaf(node)) {
        deliver(node, at);
        return;
      }
      for (const int child : pending_children(node)) {
        const double lat = tree_->node(child).parent_latency;
        trace.hops.emplace_back(child, lat);
        descend(child, at + lat);
      }
    };

    double at = graph_->latency(cn_site, tree_->node(entry).center);
    trace.hops.emplace_back(entry, at);
    int x = entry;
    while (true) {
      const NodeTable& tbl = table(x);
      if (tree_->is_leaf(x)) {
        if (leaf_holds_gip(x, gip) && !covered.count(x)) deliver(x, at);
      } else {
        for (const int child : pending_children(x)) {
          const double lat = tree_->node(child).parent_latency;
          trace.hops.emplace_back(child, lat);
          descend(child, at + lat);
        }
      }
      const auto sc = tbl.shortcut_entries.find(gip);
      if (sc != tbl.shortcut_entries.end()) {
        for (const int v : sc->second) {
          if (covered.count(v)) continue;
          const double lat = graph_->latency(tree_->node(x).center, tree_->node(v).center);
          trace.hops.emplace_back(v, lat);
          deliver(v, at + lat);
        }
      }
      const auto count = tbl.total_access_count.find(gip);
      if (count != tbl.total_access_count.end() &&
          static_cast<int>(covered.size()) >= count->second)
        break;
      const int p = tree_->node(x).parent;
      if (p == -1) break;
      const double lat = tree_->node(x).parent_latency;
      at += lat;
      trace.hops.emplace_back(p, lat);
      x = p;
    }
    trace.delivered = !trace.copies.empty();
    return trace;
  }

  /// Materializes the central invariant: for every gip, the nodes holding
  /// any entry are exactly the union of its leaf-to-root paths plus the
  /// shortcut sources of its leaves, with counts and pointers consistent.
  PlacementReport check_entry_placement() const {
    PlacementReport report;
    const auto complain = [&report](const std::string& msg) {
      report.ok = false;
      report.violations.push_back(msg);
    };

    std::set<Gip> gips;
    for (const auto& [key, _] : bindings_) gips.insert(key.first);

    // expected holdings per gip
    std::map<Gip, std::set<int>> expected;
    for (const auto& [key, b] : bindings_) {
      auto& nodes = expected[key.first];
      for (const int n : tree_->path_to_root(b.leaf)) nodes.insert(n);
    }
    std::map<Gip, std::set<int>> expected_sources;
    std::map<Gip, std::set<int>> leaves_of;
    for (const auto& [key, b] : bindings_) leaves_of[key.first].insert(b.leaf);
    for (const auto& [gip, leaves] : leaves_of)
      for (const int v : leaves)
        for (const int u : tree_->shortcut_sources(v)) expected_sources[gip].insert(u);

    // pass 1: everything held must be expected
    for (const LlpNode& n : tree_->nodes) {
      const NodeTable& tbl = table(n.id);
      std::set<Gip> held;
      for (const auto& [key, _] : tbl.leaf_entries) {
        held.insert(key.first);
        if (!n.is_leaf())
          complain("internal node " + std::to_string(n.id) + " holds a PIP entry");
      }
      for (const auto& [key, child] : tbl.child_entries) {
        held.insert(key.first);
        if (std::find(n.children.begin(), n.children.end(), child) == n.children.end())
          complain("node " + std::to_string(n.id) + " child entry points off-tree");
      }
      for (const auto& [gip, _] : tbl.total_access_count) held.insert(gip);
      for (const auto& [gip, targets] : tbl.shortcut_entries) {
        if (!expected_sources.count(gip) ||
            !expected_sources.at(gip).count(n.id))
          complain("node " + std::to_string(n.id) + " holds an unexpected shortcut entry");
        for (const int v : targets)
          if (!leaves_of.count(gip) || !leaves_of.at(gip).count(v))
            complain("node " + std::to_string(n.id) + " shortcut entry targets a stale leaf");
      }
      for (const Gip& g : held) {
        const bool on_path = expected.count(g) && expected.at(g).count(n.id);
        const bool is_source =
            expected_sources.count(g) && expected_sources.at(g).count(n.id);
        if (!on_path && !is_source) {
          complain("node " + std::to_string(n.id) + " holds entries for gip " +
                   std::to_string(g.value) + " off its placement set");
          continue;
        }
        // every entry holder (path node or shortcut source) carries the count
        const auto c = tbl.total_access_count.find(g);
        const int want = static_cast<int>(leaves_of.at(g).size());
        if (c == tbl.total_access_count.end())
          complain("node " + std::to_string(n.id) + " missing access count for gip " +
                   std::to_string(g.value));
        else if (c->second != want)
          complain("node " + std::to_string(n.id) + " stale access count for gip " +
                   std::to_string(g.value));
      }
    }

    // pass 2: everything expected must be held, pointers aimed correctly
    for (const auto& [key, b] : bindings_) {
      const auto& tbl = table(b.leaf);
      const auto pip = tbl.leaf_entries.find(key);
      if (pip == tbl.leaf_entries.end())
        complain("leaf " + std::to_string(b.leaf) + " missing PIP for gip " +
                 std::to_string(key.first.value));
      else if (pip->second != b.pip)
        complain("leaf " + std::to_string(b.leaf) + " stale PIP for gip " +
                 std::to_string(key.first.value));
      int below = b.leaf;
      for (int cur = tree_->node(b.leaf).parent; cur != -1;
           cur = tree_->node(cur).parent) {
        const auto& entries = table(cur).child_entries;
        const auto it = entries.find(key);
        if (it == entries.end())
          complain("node " + std::to_string(cur) + " missing child entry for gip " +
                   std::to_string(key.first.value));
        else if (it->second != below)
          complain("node " + std::to_string(cur) + " child entry misdirected for gip " +
                   std::to_string(key.first.value));
        below = cur;
      }
    }
    for (const auto& [gip, sources] : expected_sources)
      for (const int u : sources) {
        const auto it = table(u).shortcut_entries.find(gip);
        std::set<int> want;
        for (const int v : leaves_of.at(gip))
          if (table(v).sv_set.count(u)) want.insert(v);
        if (it == table(u).shortcut_entries.end()) {
          complain("node " + std::to_string(u) + " missing shortcut entries for gip " +
                   std::to_string(gip.value));
        } else if (it->second != want) {
          complain("node " + std::to_string(u) + " shortcut targets drifted for gip " +
                   std::to_string(gip.value));
        }
      }
    return report;
  }

  /// Test hook: corrupts state on purpose.
  NodeTable& table_for_test(int node) { return table_mut(node); }

 private:
  NodeTable& table_mut(int node) { return tables_.at(static_cast<std::size_t>(node)); }

  void require_leaf(int id) const {
    if (id < 0 || id >= tree_->node_count() || !tree_->is_leaf(id))
      throw InputError("not a leaf logical node: " + std::to_string(id));
  }

  void touch(UpdateTrace& trace, int node, Mutation m) const {
    trace.nodes_touched.emplace_back(node, m);
  }

  bool leaf_holds_gip(int leaf, const Gip& g) const {
    const auto& entries = table(leaf).leaf_entries;
    const auto it = entries.lower_bound({g, Access()});
    return it != entries.end() && it->first.first == g;
  }

  bool leaf_holds_gip_via_bindings(int leaf, const Gip& g) const {
    for (auto it = bindings_.lower_bound({g, Access()});
         it != bindings_.end() && it->first.first == g; ++it)
      if (it->second.leaf == leaf) return true;
    return false;
  }

  void drop_count_if_idle(int node, const Gip& g) {
    NodeTable& tbl = table_mut(node);
    if (!tbl.holds_mapping(g) && !tbl.shortcut_entries.count(g))
      tbl.total_access_count.erase(g);
  }

  /// Counts ride every update to the root, which then pushes the new value
  /// down each branch holding entries for the gip. Shortcut sources carry
  /// the count as part of their entry so a bypassed walk can terminate.
  /// Only nodes whose stored value actually changes are touched.
  void refresh_counts(const Gip& g, UpdateTrace& trace) {
    std::set<int> leaves;
    for (auto it = bindings_.lower_bound({g, Access()});
         it != bindings_.end() && it->first.first == g; ++it)
      leaves.insert(it->second.leaf);
    const int count = static_cast<int>(leaves.size());
    if (count == 0) return;  // teardown paths erase counts as entries go

    std::set<int> path_union;
    for (const int leaf : leaves)
      for (const int n : tree_->path_to_root(leaf)) path_union.insert(n);
    std::set<int> holders = path_union;
    for (const int leaf : leaves)
      for (const int u : table(leaf).sv_set) holders.insert(u);
    bool changed = false;
    for (const int n : holders) {
      auto& slot = table_mut(n).total_access_count;
      const auto it = slot.find(g);
      if (it != slot.end() && it->second == count) continue;
      slot[g] = count;
      touch(trace, n, Mutation::kCountRefresh);
      changed = true;
    }
    if (!changed) return;
    // push messages from the root down every holding branch
    for (const int n : path_union) {
      const int p = tree_->node(n).parent;
      if (p != -1 && path_union.count(p))
        trace.messages.push_back(Message{p, n, tree_->node(n).parent_latency});
    }
  }

  void shortcut_install(const Gip& g, int leaf, UpdateTrace& trace) {
    for (const int u : table(leaf).sv_set) {
      table_mut(u).shortcut_entries[g].insert(leaf);
      touch(trace, u, Mutation::kShortcutAdd);
      trace.messages.push_back(Message{
          leaf, u, graph_->latency(tree_->node(leaf).center, tree_->node(u).center)});
    }
  }

  void shortcut_withdraw(const Gip& g, int leaf, UpdateTrace& trace) {
    for (const int u : table(leaf).sv_set) {
      NodeTable& tbl = table_mut(u);
      const auto it = tbl.shortcut_entries.find(g);
      if (it == tbl.shortcut_entries.end()) continue;
      it->second.erase(leaf);
      if (it->second.empty()) tbl.shortcut_entries.erase(it);
      drop_count_if_idle(u, g);
      touch(trace, u, Mutation::kShortcutDelete);
      trace.messages.push_back(Message{
          leaf, u, graph_->latency(tree_->node(leaf).center, tree_->node(u).center)});
    }
  }

  void log_event(const char* op, const Gip& g, const Access& a,
                 const UpdateTrace& trace) const {
    if (event_log_ == nullptr) return;
    std::ostream& out = *event_log_;
    out << "{\"op\":\"" << op << "\",\"gip\":" << g.value << ",\"access\":\"" << a
        << "\",\"ack_ms\":" << trace.ack_latency << ",\"no_op\":"
        << (trace.no_op ? "true" : "false") << ",\"touched\":[";
    for (std::size_t i = 0; i < trace.nodes_touched.size(); ++i) {
      if (i) out << ',';
      out << "[" << trace.nodes_touched[i].first << ",\""
          << mutation_name(trace.nodes_touched[i].second) << "\"]";
    }
    out << "]}\n";
  }

  const LlpTree* tree_;
  const MetricGraph* graph_;
  std::vector<NodeTable> tables_;
  std::map<std::pair<Gip, Access>, AccessBinding> bindings_;
  std::ostream* event_log_ = nullptr;
};

inline double direct_path_latency(const LlpTree& tree, const MetricGraph& graph,
                                  int cn_site, const AccessBinding& binding) {
  return graph.latency(cn_site, tree.node(binding.leaf).center) + binding.attach_latency;
}

}  // namespace llp
