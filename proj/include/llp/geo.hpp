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
#include <numbers>

namespace llp {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kSpeedOfLightKmPerSec = 299792.458;

// Latency model: great-circle distance over light speed, scaled by a
// propagation factor that absorbs fiber path stretch and equipment delay.
inline constexpr double kDefaultPropagationFactor = 2.0;

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Great-circle distance between two coordinates, in kilometers.
inline double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  const double phi1 = deg_to_rad(lat1);
  const double phi2 = deg_to_rad(lat2);
  const double dphi = deg_to_rad(lat2 - lat1);
  const double dlam = deg_to_rad(lon2 - lon1);
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlam / 2.0);
  const double a = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

/// One-way propagation latency along the geodesic, in milliseconds.
inline double geodesic_latency_ms(double lat1, double lon1, double lat2,
                                  double lon2,
                                  double factor = kDefaultPropagationFactor) {
  return haversine_km(lat1, lon1, lat2, lon2) / kSpeedOfLightKmPerSec * 1000.0 *
         factor;
}

}  // namespace llp
