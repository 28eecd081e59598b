#include <catch2/catch.hpp>

#include <limits>
#include <vector>

#include "llp/metric_graph.hpp"
#include "llp/rng.hpp"
#include "test_support.hpp"

namespace {

// Brute-force Floyd-Warshall over an explicit adjacency, the oracle for
// the closure path.
std::vector<double> brute_apsp(int n, const std::vector<llp::RawEdge>& edges,
                               const std::vector<llp::PopSite>& sites) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> d(static_cast<std::size_t>(n) * n, kInf);
  for (int i = 0; i < n; ++i) d[i * n + i] = 0.0;
  for (const llp::RawEdge& e : edges) {
    const double l = e.latency_ms ? *e.latency_ms
                                  : llp::geodesic_latency(sites[e.u], sites[e.v]);
    d[e.u * n + e.v] = std::min(d[e.u * n + e.v], l);
    d[e.v * n + e.u] = std::min(d[e.v * n + e.u], l);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
  return d;
}

std::vector<llp::PopSite> simple_sites(int n) {
  std::vector<llp::PopSite> sites;
  for (int i = 0; i < n; ++i)
    sites.push_back(llp::PopSite{i, "s" + std::to_string(i), 0.0, i * 0.1, 1.0});
  return sites;
}

}  // namespace

TEST_CASE("metric closure concatenates a line") {
  const auto g = llp_test::line_graph(3);
  CHECK(g.latency(0, 2) == Approx(2.0));
  CHECK(g.latency(0, 1) == Approx(1.0));
  CHECK(g.underlay_path(0, 2) == std::vector<int>{0, 1, 2});
}

TEST_CASE("metric closure matches brute force on the unit square") {
  const auto g = llp_test::unit_square_graph();
  const double r2 = std::sqrt(2.0);
  std::vector<llp::RawEdge> edges{{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0},
                                  {3, 0, 1.0}, {0, 2, r2},  {1, 3, r2}};
  const auto want = brute_apsp(4, edges, simple_sites(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(g.latency(i, j) == Approx(want[i * 4 + j]).margin(1e-12));
  CHECK(g.latency(0, 2) == Approx(r2));
}

TEST_CASE("metric closure repairs a broken triangle") {
  auto sites = simple_sites(3);
  std::vector<llp::RawEdge> edges{{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 5.0}};
  const auto g = llp::metric_closure(sites, edges);
  CHECK(g.latency(0, 2) == Approx(2.0));
  CHECK(g.underlay_path(0, 2) == std::vector<int>{0, 1, 2});
}

TEST_CASE("metric closure rejects non-positive edge latency") {
  auto sites = simple_sites(2);
  CHECK_THROWS_AS(llp::metric_closure(sites, {llp::RawEdge{0, 1, 0.0}}),
                  llp::InputError);
  CHECK_THROWS_AS(llp::metric_closure(sites, {llp::RawEdge{0, 1, -2.0}}),
                  llp::InputError);
  CHECK_THROWS_AS(llp::metric_closure({}, {}), llp::InputError);
}

TEST_CASE("disconnected topologies fall back to geodesic and stay metric") {
  // two components far apart; no edge between them
  std::vector<llp::PopSite> sites{
      {0, "a0", 40.0, -74.0, 1.0}, {1, "a1", 40.5, -74.5, 1.0},
      {2, "b0", 34.0, -118.0, 1.0}, {3, "b1", 34.5, -118.5, 1.0},
  };
  std::vector<llp::RawEdge> edges{{0, 1, std::nullopt}, {2, 3, std::nullopt}};
  const auto g = llp::metric_closure(sites, edges);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(g.latency(i, j) == Approx(g.latency(j, i)).margin(1e-12));
      for (int k = 0; k < 4; ++k)
        CHECK(llp::approx_leq(g.latency(i, j), g.latency(i, k) + g.latency(k, j)));
    }
  CHECK(g.latency(0, 2) > 0.0);
}

TEST_CASE("triangle inequality holds across random edge sets") {
  llp::Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(10));
    auto sites = simple_sites(n);
    for (auto& s : sites) {
      s.lat = 25.0 + rng.unit() * 20.0;
      s.lon = -120.0 + rng.unit() * 40.0;
    }
    std::vector<llp::RawEdge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, std::nullopt});
    for (int extra = 0; extra < n; ++extra) {
      const int u = static_cast<int>(rng.below(n));
      const int v = static_cast<int>(rng.below(n));
      if (u != v) edges.push_back({u, v, 0.5 + rng.unit() * 20.0});
    }
    const auto g = llp::metric_closure(sites, edges);
    for (int i = 0; i < n; ++i) {
      CHECK(g.latency(i, i) == 0.0);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          CHECK(llp::approx_leq(g.latency(i, j), g.latency(i, k) + g.latency(k, j)));
    }
  }
}

TEST_CASE("closure is deterministic for identical inputs") {
  const auto a = llp_test::line_graph(5);
  const auto b = llp_test::line_graph(5);
  CHECK(a == b);
}

TEST_CASE("underlay paths stay single-hop on a complete geodesic metric") {
  const auto g = llp_test::random_point_graph(12, 99);
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j)
      CHECK(g.underlay_path(i, j).size() <= 2);
}
