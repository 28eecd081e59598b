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
#include <stdexcept>
#include <string>

namespace llp {

/// Unreadable or malformed input (file, CSV, GraphML, JSON, CLI argument).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural invariant that must hold by construction was violated.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Time for an endpoint to notice its access link changed, measured once
// on a software-disabled link. Shared by every mobility scheme compared.
inline constexpr double kMobilityDiscoveryMs = 38.0;

// Threshold comparisons on latencies use a 1e-9 relative slack so that
// hand-derived fixture values survive float summation order.
inline bool approx_leq(double a, double b) {
  return a <= b + 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline bool approx_eq(double a, double b) {
  return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline bool approx_lt(double a, double b) { return !approx_leq(b, a); }

}  // namespace llp
