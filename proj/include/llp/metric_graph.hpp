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

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "llp/common.hpp"
#include "llp/geo.hpp"

namespace llp {

/// A deployable backbone site: one vertex of the metric graph.
struct PopSite {
  int id = 0;
  std::string name;
  double lat = 0.0;
  double lon = 0.0;
  double weight = 1.0;  // population-derived, used by weighted center reset
};

/// Undirected underlay link. Latency is explicit when the source file
/// carries one; otherwise the geodesic model supplies it.
struct RawEdge {
  int u = 0;
  int v = 0;
  std::optional<double> latency_ms;
};

/// Complete latency metric over PoP sites: symmetric, zero diagonal,
/// triangle inequality exact. Also keeps the next-hop matrix of the
/// underlying shortest paths so overlay detours stay observable.
class MetricGraph {
 public:
  MetricGraph() = default;

  MetricGraph(std::vector<PopSite> sites, std::vector<double> latency,
              std::vector<int> next)
      : sites_(std::move(sites)),
        latency_(std::move(latency)),
        next_(std::move(next)) {}

  int size() const { return static_cast<int>(sites_.size()); }

  const PopSite& site(int i) const { return sites_.at(static_cast<std::size_t>(i)); }
  PopSite& site(int i) { return sites_.at(static_cast<std::size_t>(i)); }
  const std::vector<PopSite>& sites() const { return sites_; }

  double latency(int i, int j) const {
    return latency_[static_cast<std::size_t>(i) * sites_.size() +
                    static_cast<std::size_t>(j)];
  }

  /// Inclusive node sequence of the shortest underlay path i -> j.
  std::vector<int> underlay_path(int i, int j) const {
    std::vector<int> path{i};
    int cur = i;
    while (cur != j) {
      cur = next_[static_cast<std::size_t>(cur) * sites_.size() +
                  static_cast<std::size_t>(j)];
      path.push_back(cur);
    }
    return path;
  }

  double diameter() const {
    double d = 0.0;
    for (int i = 0; i < size(); ++i)
      for (int j = i + 1; j < size(); ++j) d = std::max(d, latency(i, j));
    return d;
  }

  double min_positive_latency() const {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < size(); ++i)
      for (int j = i + 1; j < size(); ++j)
        if (latency(i, j) > 0.0) d = std::min(d, latency(i, j));
    return d;
  }

  /// Site with the least latency to the given coordinates; ties resolve
  /// to the lower id.
  int nearest_site(double lat, double lon) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < size(); ++i) {
      const double d = haversine_km(lat, lon, sites_[static_cast<std::size_t>(i)].lat,
                                    sites_[static_cast<std::size_t>(i)].lon);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  bool operator==(const MetricGraph& other) const {
    if (size() != other.size()) return false;
    for (int i = 0; i < size(); ++i) {
      const PopSite& a = site(i);
      const PopSite& b = other.site(i);
      if (a.id != b.id || a.name != b.name || a.lat != b.lat || a.lon != b.lon ||
          a.weight != b.weight)
        return false;
    }
    return latency_ == other.latency_;
  }

 private:
  std::vector<PopSite> sites_;
  std::vector<double> latency_;  // n*n row-major
  std::vector<int> next_;        // next hop on the shortest i->j underlay path
};

/// Geodesic latency between two sites.
inline double geodesic_latency(const PopSite& a, const PopSite& b,
                               double factor = kDefaultPropagationFactor) {
  return geodesic_latency_ms(a.lat, a.lon, b.lat, b.lon, factor);
}

/// Builds the complete metric from sites and (optionally) underlay edges.
///
/// Edge latencies default to the geodesic model where the file gave none.
/// Pairs left unreachable by the edge set fall back to the direct geodesic
/// latency, and a final relaxation pass restores the triangle inequality.
/// When no edges are given at all, the metric is the complete geodesic one.
inline MetricGraph metric_closure(std::vector<PopSite> sites,
                                  const std::vector<RawEdge>& edges,
                                  double factor = kDefaultPropagationFactor) {
  const int n = static_cast<int>(sites.size());
  if (n == 0) throw InputError("metric_closure: no sites");
  for (int i = 0; i < n; ++i) sites[static_cast<std::size_t>(i)].id = i;

  const std::size_t nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(nn, kInf);
  std::vector<int> next(nn, -1);
  auto at = [n](int i, int j) {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
           static_cast<std::size_t>(j);
  };
  for (int i = 0; i < n; ++i) {
    dist[at(i, i)] = 0.0;
    next[at(i, i)] = i;
  }

  auto add_direct = [&](int u, int v, double l) {
    if (l < dist[at(u, v)]) {
      dist[at(u, v)] = l;
      dist[at(v, u)] = l;
      next[at(u, v)] = v;
      next[at(v, u)] = u;
    }
  };

  if (edges.empty()) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double l = geodesic_latency(sites[static_cast<std::size_t>(i)],
                                          sites[static_cast<std::size_t>(j)], factor);
        // co-located sites still need a positive off-diagonal latency
        add_direct(i, j, std::max(l, 1e-9));
      }
  } else {
    for (const RawEdge& e : edges) {
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n || e.u == e.v)
        throw InputError("metric_closure: edge endpoint out of range");
      double l;
      if (e.latency_ms.has_value()) {
        l = *e.latency_ms;
        if (!(l > 0.0)) throw InputError("metric_closure: non-positive edge latency");
      } else {
        l = geodesic_latency(sites[static_cast<std::size_t>(e.u)],
                             sites[static_cast<std::size_t>(e.v)], factor);
        if (l <= 0.0) l = 1e-9;  // co-located endpoints still form a usable link
      }
      add_direct(e.u, e.v, l);
    }
  }

  auto relax_all = [&] {
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        const double dik = dist[at(i, k)];
        if (dik == kInf) continue;
        for (int j = 0; j < n; ++j) {
          const double cand = dik + dist[at(k, j)];
          if (cand < dist[at(i, j)]) {
            dist[at(i, j)] = cand;
            next[at(i, j)] = next[at(i, k)];
          }
        }
      }
  };
  relax_all();

  // Disconnected pairs: direct geodesic fallback keeps the metric total,
  // then one more pass repairs any triangle the fallback broke.
  bool patched = false;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dist[at(i, j)] == kInf) {
        const double l = geodesic_latency(sites[static_cast<std::size_t>(i)],
                                          sites[static_cast<std::size_t>(j)], factor);
        add_direct(i, j, std::max(l, 1e-9));
        patched = true;
      }
  if (patched) relax_all();

  return MetricGraph(std::move(sites), std::move(dist), std::move(next));
}

}  // namespace llp
