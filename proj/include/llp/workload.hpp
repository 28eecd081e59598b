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
#include <vector>

#include "llp/common.hpp"
#include "llp/metric_graph.hpp"
#include "llp/population.hpp"
#include "llp/protocol.hpp"
#include "llp/rng.hpp"
#include "llp/tree.hpp"

namespace llp {

struct Connection {
  int cn_county = -1;
  int mn_county = -1;
  int cn_site = -1;  // nearest PoP to the CN county center
  int mn_site = -1;
};

struct MoveEvent {
  int connection = -1;  // which MN relocates (one gip per connection)
  Access access = access::kFiveG;
  int from_leaf = -1;
  int to_leaf = -1;
};

struct Workload {
  std::vector<Connection> connections;
  std::vector<MoveEvent> moves;
  std::uint64_t seed = 0;
};

/// Fraction of moves kept between leaves sharing a parent; the rest jump
/// to an arbitrary leaf. Local mobility dominates in practice.
inline constexpr double kSiblingMoveFraction = 0.7;

/// Samples connection endpoints with probability proportional to the
/// county population product over their distance (1 km floor); moves pick
/// a connection uniformly and relocate its MN. Reproducible from the seed.
inline Workload gen_workload(const std::vector<CountyRecord>& counties,
                             const MetricGraph& graph, const LlpTree& tree,
                             int n_connections, int n_moves, std::uint64_t seed,
                             double sibling_fraction = kSiblingMoveFraction) {
  if (counties.empty()) throw InputError("gen_workload: no counties");
  if (n_connections < 1) throw InputError("gen_workload: need at least one connection");

  Workload w;
  w.seed = seed;
  Rng rng(seed);

  const int c = static_cast<int>(counties.size());
  std::vector<int> county_site(static_cast<std::size_t>(c));
  for (int i = 0; i < c; ++i)
    county_site[static_cast<std::size_t>(i)] =
        graph.nearest_site(counties[static_cast<std::size_t>(i)].lat,
                           counties[static_cast<std::size_t>(i)].lon);

  // cumulative table over ordered county pairs (a != b)
  std::vector<double> cumulative;
  cumulative.reserve(static_cast<std::size_t>(c) * static_cast<std::size_t>(c));
  double total = 0.0;
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b) {
      double weight = 0.0;
      if (a != b) {
        const CountyRecord& ca = counties[static_cast<std::size_t>(a)];
        const CountyRecord& cb = counties[static_cast<std::size_t>(b)];
        const double dist = std::max(haversine_km(ca.lat, ca.lon, cb.lat, cb.lon), 1.0);
        weight = ca.population * cb.population / dist;
      }
      total += weight;
      cumulative.push_back(total);
    }
  if (!(total > 0.0))
    throw InputError("gen_workload: county weights degenerate (need two counties with population)");

  for (int i = 0; i < n_connections; ++i) {
    const std::size_t idx = rng.pick_cumulative(cumulative);
    const int a = static_cast<int>(idx) / c;
    const int b = static_cast<int>(idx) % c;
    w.connections.push_back(Connection{a, b, county_site[static_cast<std::size_t>(a)],
                                       county_site[static_cast<std::size_t>(b)]});
  }

  // track each MN's current leaf while the move list is generated
  const std::vector<int> leaves = tree.leaf_ids();
  std::vector<int> current(w.connections.size());
  for (std::size_t i = 0; i < w.connections.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_leaf = leaves.front();
    for (const int leaf : leaves) {
      const double d = graph.latency(w.connections[i].mn_site, tree.node(leaf).center);
      if (d < best) {
        best = d;
        best_leaf = leaf;
      }
    }
    current[i] = best_leaf;
  }

  for (int m = 0; m < n_moves; ++m) {
    const std::size_t conn = static_cast<std::size_t>(rng.below(w.connections.size()));
    const int from = current[conn];
    std::vector<int> pool;
    if (rng.chance(sibling_fraction)) {
      const int parent = tree.node(from).parent;
      if (parent != -1)
        for (const int sib : tree.node(parent).children)
          if (sib != from && tree.is_leaf(sib)) pool.push_back(sib);
    }
    if (pool.empty()) {
      for (const int leaf : leaves)
        if (leaf != from) pool.push_back(leaf);
    }
    if (pool.empty()) pool.push_back(from);  // single-leaf tree: stay put
    const int to = pool[static_cast<std::size_t>(rng.below(pool.size()))];
    w.moves.push_back(MoveEvent{static_cast<int>(conn), access::kFiveG, from, to});
    current[conn] = to;
  }
  return w;
}

}  // namespace llp
