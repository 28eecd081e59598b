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

#include <cctype>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "llp/common.hpp"
#include "llp/metric_graph.hpp"

namespace llp {

struct CountyRecord {
  std::string name;
  double lat = 0.0;
  double lon = 0.0;
  double population = 0.0;
};

struct PopulationData {
  std::vector<CountyRecord> counties;
  int skipped_rows = 0;
};

namespace csv_detail {

inline std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline std::string lower_trim(std::string s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  s = s.substr(b, e - b);
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::optional<double> strict_double(const std::string& s) {
  const std::string t = lower_trim(s);
  if (t.empty()) return std::nullopt;
  std::size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &consumed);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (consumed != t.size()) return std::nullopt;
  return v;
}

}  // namespace csv_detail

/// Loads county records from a headered CSV. Columns are located by
/// header name: name, latitude/lat, longitude/lon/lng, population/pop.
/// Rows with unparseable coordinates or a negative population are
/// skipped and counted.
inline PopulationData load_population(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("load_population: cannot read " + path);

  std::string line;
  if (!std::getline(in, line)) throw InputError("load_population: empty file " + path);

  using namespace csv_detail;
  const std::vector<std::string> header = split_row(line);
  int col_name = -1, col_lat = -1, col_lon = -1, col_pop = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    const std::string h = lower_trim(header[static_cast<std::size_t>(i)]);
    if (col_name < 0 && (h == "name" || h == "county" || h == "county_name"))
      col_name = i;
    else if (col_lat < 0 && (h == "lat" || h == "latitude"))
      col_lat = i;
    else if (col_lon < 0 && (h == "lon" || h == "lng" || h == "long" || h == "longitude"))
      col_lon = i;
    else if (col_pop < 0 && (h == "population" || h == "pop"))
      col_pop = i;
  }
  if (col_name < 0 || col_lat < 0 || col_lon < 0 || col_pop < 0)
    throw InputError("load_population: header must name name/latitude/longitude/population columns");

  PopulationData out;
  const int needed = std::max({col_name, col_lat, col_lon, col_pop}) + 1;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> row = split_row(line);
    if (static_cast<int>(row.size()) < needed) {
      ++out.skipped_rows;
      continue;
    }
    const auto lat = strict_double(row[static_cast<std::size_t>(col_lat)]);
    const auto lon = strict_double(row[static_cast<std::size_t>(col_lon)]);
    const auto pop = strict_double(row[static_cast<std::size_t>(col_pop)]);
    const bool ok = lat && lon && pop && *lat >= -90.0 && *lat <= 90.0 &&
                    *lon >= -180.0 && *lon <= 180.0 && *pop >= 0.0;
    if (!ok) {
      ++out.skipped_rows;
      continue;
    }
    out.counties.push_back(CountyRecord{row[static_cast<std::size_t>(col_name)], *lat,
                                        *lon, *pop});
  }
  if (out.counties.empty()) throw InputError("load_population: no valid rows in " + path);
  return out;
}

/// Each site's weight becomes the total population of the counties whose
/// nearest site (geodesic, ties to the lower id) it is. Sites that win no
/// county get 1% of the smallest positive assigned weight so weighted
/// center selection never divides by zero.
inline MetricGraph assign_weights(MetricGraph graph,
                                  const std::vector<CountyRecord>& counties) {
  if (counties.empty()) throw InputError("assign_weights: no counties");
  std::vector<double> totals(static_cast<std::size_t>(graph.size()), 0.0);
  for (const CountyRecord& c : counties)
    totals[static_cast<std::size_t>(graph.nearest_site(c.lat, c.lon))] += c.population;

  double min_positive = std::numeric_limits<double>::infinity();
  for (const double w : totals)
    if (w > 0.0) min_positive = std::min(min_positive, w);
  const double floor_weight =
      std::isfinite(min_positive) ? min_positive * 0.01 : 1.0;

  for (int i = 0; i < graph.size(); ++i) {
    const double w = totals[static_cast<std::size_t>(i)];
    graph.site(i).weight = w > 0.0 ? w : floor_weight;
  }
  return graph;
}

}  // namespace llp
