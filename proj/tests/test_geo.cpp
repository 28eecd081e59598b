#include <catch2/catch.hpp>

#include <cmath>

#include "llp/geo.hpp"
#include "llp/metric_graph.hpp"
#include "llp/rng.hpp"

namespace {

// Independent haversine oracle: spherical law of cosines variant, written
// from the formula rather than the library path it checks.
double oracle_distance_km(double lat1, double lon1, double lat2, double lon2) {
  const double rad = std::numbers::pi / 180.0;
  const double p1 = lat1 * rad, p2 = lat2 * rad;
  const double dl = (lon2 - lon1) * rad;
  const double cosc =
      std::sin(p1) * std::sin(p2) + std::cos(p1) * std::cos(p2) * std::cos(dl);
  return llp::kEarthRadiusKm * std::acos(std::clamp(cosc, -1.0, 1.0));
}

double oracle_latency_ms(double lat1, double lon1, double lat2, double lon2,
                         double factor) {
  return oracle_distance_km(lat1, lon1, lat2, lon2) / llp::kSpeedOfLightKmPerSec *
         1000.0 * factor;
}

}  // namespace

TEST_CASE("geodesic latency is zero for identical coordinates") {
  CHECK(llp::geodesic_latency_ms(40.0, -74.0, 40.0, -74.0, 2.0) == 0.0);
}

TEST_CASE("geodesic latency NYC to LA near 26.3 ms at the default factor") {
  const double got = llp::geodesic_latency_ms(40.71, -74.01, 34.05, -118.24, 2.0);
  const double want = oracle_latency_ms(40.71, -74.01, 34.05, -118.24, 2.0);
  CHECK(got == Approx(want).epsilon(1e-6));
  CHECK(got == Approx(26.3).margin(0.3));
}

TEST_CASE("antipodal points cost about 66.8 ms at factor one") {
  const double got = llp::geodesic_latency_ms(0.0, 0.0, 0.0, 180.0, 1.0);
  CHECK(got == Approx(std::numbers::pi * llp::kEarthRadiusKm /
                      llp::kSpeedOfLightKmPerSec * 1000.0)
                   .epsilon(1e-9));
  CHECK(got == Approx(66.8).margin(0.1));
}

TEST_CASE("geodesic latency is symmetric and triangular") {
  llp::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto point = [&rng] {
      return std::pair<double, double>{-80.0 + rng.unit() * 160.0,
                                       -180.0 + rng.unit() * 360.0};
    };
    const auto [la, lo] = point();
    const auto [lb, lob] = point();
    const auto [lc, loc] = point();
    const double ab = llp::geodesic_latency_ms(la, lo, lb, lob, 2.0);
    const double ba = llp::geodesic_latency_ms(lb, lob, la, lo, 2.0);
    const double bc = llp::geodesic_latency_ms(lb, lob, lc, loc, 2.0);
    const double ac = llp::geodesic_latency_ms(la, lo, lc, loc, 2.0);
    CHECK(ab == Approx(ba).margin(1e-12));
    CHECK(ac <= ab + bc + 1e-9 * std::max(1.0, ac));
    CHECK(ab == Approx(oracle_latency_ms(la, lo, lb, lob, 2.0)).margin(1e-6));
  }
}
