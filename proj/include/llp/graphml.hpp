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
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "llp/common.hpp"
#include "llp/metric_graph.hpp"

namespace llp {

/// Result of GraphML ingestion. Nodes lacking usable coordinates are
/// dropped (and counted); edges touching dropped nodes go with them.
struct LoadedTopology {
  std::vector<PopSite> sites;
  std::vector<RawEdge> edges;
  int dropped_nodes = 0;
};

namespace graphml_detail {

struct Tag {
  std::string name;
  std::map<std::string, std::string> attrs;
  bool closing = false;      // </name>
  bool self_closing = false; // <name/>
};

inline std::string decode_entities(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const std::size_t end = s.find(';', i);
    if (end == std::string::npos) throw InputError("graphml: unterminated entity");
    const std::string ent = s.substr(i + 1, end - i - 1);
    if (ent == "amp") out.push_back('&');
    else if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else throw InputError("graphml: unknown entity &" + ent + ";");
    i = end;
  }
  return out;
}

inline std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Pull-style scanner over the raw document. Handles exactly the XML
// subset Topology Zoo files use: declaration, comments, elements with
// quoted attributes, and text content.
class Scanner {
 public:
  explicit Scanner(std::string text) : text_(std::move(text)) {}

  /// Advances to the next element tag; intervening text accumulates into
  /// `pending_text`. Returns false at end of document.
  bool next(Tag& tag, std::string& pending_text) {
    pending_text.clear();
    while (pos_ < text_.size()) {
      const std::size_t lt = text_.find('<', pos_);
      if (lt == std::string::npos) {
        pos_ = text_.size();
        return false;
      }
      pending_text += text_.substr(pos_, lt - pos_);
      pos_ = lt;
      if (starts_with("<!--")) {
        const std::size_t end = text_.find("-->", pos_);
        if (end == std::string::npos) throw InputError("graphml: unterminated comment");
        pos_ = end + 3;
        continue;
      }
      if (starts_with("<?") || starts_with("<!")) {
        const std::size_t end = text_.find('>', pos_);
        if (end == std::string::npos) throw InputError("graphml: unterminated declaration");
        pos_ = end + 1;
        continue;
      }
      parse_tag(tag);
      return true;
    }
    return false;
  }

 private:
  bool starts_with(const char* s) const {
    return text_.compare(pos_, std::char_traits<char>::length(s), s) == 0;
  }

  void parse_tag(Tag& tag) {
    tag.attrs.clear();
    tag.closing = false;
    tag.self_closing = false;
    ++pos_;  // consume '<'
    if (pos_ < text_.size() && text_[pos_] == '/') {
      tag.closing = true;
      ++pos_;
    }
    const std::size_t name_start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '>' && text_[pos_] != '/')
      ++pos_;
    tag.name = text_.substr(name_start, pos_ - name_start);
    if (tag.name.empty()) throw InputError("graphml: empty tag name");

    while (true) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (pos_ >= text_.size()) throw InputError("graphml: unterminated tag");
      if (text_[pos_] == '>') {
        ++pos_;
        return;
      }
      if (text_[pos_] == '/') {
        ++pos_;
        if (pos_ >= text_.size() || text_[pos_] != '>')
          throw InputError("graphml: malformed self-closing tag");
        ++pos_;
        tag.self_closing = true;
        return;
      }
      // attribute
      const std::size_t key_start = pos_;
      while (pos_ < text_.size() && text_[pos_] != '=' &&
             !std::isspace(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      const std::string key = text_.substr(key_start, pos_ - key_start);
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (pos_ >= text_.size() || text_[pos_] != '=')
        throw InputError("graphml: attribute without value");
      ++pos_;
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\''))
        throw InputError("graphml: unquoted attribute value");
      const char quote = text_[pos_++];
      const std::size_t val_end = text_.find(quote, pos_);
      if (val_end == std::string::npos) throw InputError("graphml: unterminated attribute");
      tag.attrs[key] = decode_entities(text_.substr(pos_, val_end - pos_));
      pos_ = val_end + 1;
    }
  }

  std::string text_;
  std::size_t pos_ = 0;
};

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &consumed);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  while (consumed < s.size() && std::isspace(static_cast<unsigned char>(s[consumed])))
    ++consumed;
  if (consumed != s.size()) return std::nullopt;
  return v;
}

}  // namespace graphml_detail

/// Parses a Topology Zoo style GraphML file.
///
/// Node keys named Latitude / Longitude (case-insensitive) become site
/// coordinates; a key named label becomes the site name. Edge keys whose
/// name contains "latency" pass through as explicit link latencies (ms).
inline LoadedTopology load_topology(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("load_topology: cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();

  using namespace graphml_detail;
  Scanner scanner(buf.str());

  struct KeyDecl {
    std::string domain;  // "node" or "edge"
    std::string attr;    // lowercased attr.name
  };
  std::map<std::string, KeyDecl> keys;

  struct NodeAcc {
    std::string xml_id;
    std::string label;
    std::optional<double> lat, lon;
  };
  struct EdgeAcc {
    std::string src, dst;
    std::optional<double> latency;
  };
  std::vector<NodeAcc> nodes;
  std::vector<EdgeAcc> edges;

  enum class Where { kOutside, kNode, kEdge } where = Where::kOutside;
  std::string data_key;
  bool in_data = false;
  int depth_guard = 0;

  Tag tag;
  std::string pending;
  while (scanner.next(tag, pending)) {
    if (in_data && !tag.closing) throw InputError("graphml: nested element inside <data>");
    if (tag.closing) {
      --depth_guard;
      if (tag.name == "data" && in_data) {
        const std::string value = decode_entities(pending);
        const auto it = keys.find(data_key);
        const std::string attr = it != keys.end() ? it->second.attr : std::string();
        if (where == Where::kNode && !nodes.empty()) {
          NodeAcc& n = nodes.back();
          if (attr == "latitude") n.lat = parse_double(value);
          else if (attr == "longitude") n.lon = parse_double(value);
          else if (attr == "label" && n.label.empty()) n.label = value;
        } else if (where == Where::kEdge && !edges.empty()) {
          if (attr.find("latency") != std::string::npos)
            edges.back().latency = parse_double(value);
        }
        in_data = false;
      } else if (tag.name == "node" || tag.name == "edge") {
        where = Where::kOutside;
      }
      continue;
    }

    if (!tag.self_closing) ++depth_guard;
    if (tag.name == "key") {
      KeyDecl decl;
      decl.domain = tag.attrs.count("for") ? tag.attrs["for"] : "";
      decl.attr = to_lower(tag.attrs.count("attr.name") ? tag.attrs["attr.name"] : "");
      if (tag.attrs.count("id")) keys[tag.attrs["id"]] = decl;
      if (!tag.self_closing) {
        // keys may carry a <default> child; skip until the matching close
        Tag inner;
        std::string skip;
        int nest = 1;
        while (nest > 0 && scanner.next(inner, skip)) {
          if (inner.self_closing) continue;
          nest += inner.closing ? -1 : 1;
        }
        --depth_guard;
      }
    } else if (tag.name == "node") {
      NodeAcc n;
      n.xml_id = tag.attrs.count("id") ? tag.attrs["id"] : "";
      if (n.xml_id.empty()) throw InputError("graphml: node without id");
      nodes.push_back(std::move(n));
      if (tag.self_closing) continue;
      where = Where::kNode;
    } else if (tag.name == "edge") {
      EdgeAcc e;
      if (!tag.attrs.count("source") || !tag.attrs.count("target"))
        throw InputError("graphml: edge without endpoints");
      e.src = tag.attrs["source"];
      e.dst = tag.attrs["target"];
      edges.push_back(std::move(e));
      if (tag.self_closing) continue;
      where = Where::kEdge;
    } else if (tag.name == "data") {
      data_key = tag.attrs.count("key") ? tag.attrs["key"] : "";
      if (!tag.self_closing) in_data = true;
    }
  }
  if (depth_guard != 0) throw InputError("graphml: unbalanced tags");

  LoadedTopology out;
  std::map<std::string, int> index;  // xml id -> dense site index
  for (const NodeAcc& n : nodes) {
    const bool usable = n.lat.has_value() && n.lon.has_value() && *n.lat >= -90.0 &&
                        *n.lat <= 90.0 && *n.lon >= -180.0 && *n.lon <= 180.0;
    if (!usable) {
      ++out.dropped_nodes;
      continue;
    }
    PopSite site;
    site.id = static_cast<int>(out.sites.size());
    site.name = n.label.empty() ? n.xml_id : n.label;
    site.lat = *n.lat;
    site.lon = *n.lon;
    index[n.xml_id] = site.id;
    out.sites.push_back(std::move(site));
  }
  if (out.sites.empty()) throw InputError("load_topology: no usable nodes in " + path);

  for (const EdgeAcc& e : edges) {
    const auto su = index.find(e.src);
    const auto sv = index.find(e.dst);
    if (su == index.end() || sv == index.end()) continue;  // touched a dropped node
    if (su->second == sv->second) continue;                // self loop
    out.edges.push_back(RawEdge{su->second, sv->second, e.latency});
  }
  return out;
}

}  // namespace llp
