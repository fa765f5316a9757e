#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "crn/cluster.hpp"
#include "crn/config.hpp"
#include "crn/ross.hpp"
#include "crn/scenario.hpp"
#include "crn/topology.hpp"

namespace crn::io {

using nlohmann::json;

class FormatError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline json channels_json(const ChannelSet& s) { return json(s.to_vector()); }

/// Parsed text stores non-negative integers as unsigned, values built in
/// code as signed; both are accepted.
inline bool is_index(const json& j) {
  return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

inline ChannelSet channels_from(const json& j, std::size_t num_channels, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": channels must be an array");
  ChannelSet s;
  for (const auto& c : j) {
    if (!is_index(c)) throw FormatError(where + ": channel indices must be non-negative integers");
    const auto v = c.get<std::uint64_t>();
    if (v >= num_channels) throw FormatError(where + ": channel " + std::to_string(v) + " outside [0, num_channels)");
    s.insert(static_cast<Channel>(v));
  }
  return s;
}

inline Point point_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw FormatError(where + ": pos must be [x, y]");
  return Point{j[0].get<double>(), j[1].get<double>()};
}

inline const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing field '" + key + "'");
  return j.at(key);
}

}  // namespace detail

inline json to_json(const Topology& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes()) {
    json jn = {{"id", n.id}, {"channels", detail::channels_json(n.channels)}};
    if (n.pos) jn["pos"] = {n.pos->x, n.pos->y};
    nodes.push_back(std::move(jn));
  }
  json edges = json::array();
  for (auto [a, b] : t.edges()) edges.push_back({a, b});
  return json{{"num_channels", t.num_channels()}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

/// Edges come from the document when present. Without them, positioned
/// nodes need `cr_range` (in the document or passed as `range`) to derive
/// the unit-disk adjacency.
inline Topology topology_from_json(const json& j, std::optional<double> range = std::nullopt) {
  const std::string where = "topology";
  const auto& nc = detail::require(j, "num_channels", where);
  if (!detail::is_index(nc)) throw FormatError(where + ": num_channels must be a non-negative integer");
  const auto num_channels = nc.get<std::size_t>();
  if (num_channels > kMaxChannels) throw FormatError(where + ": num_channels exceeds capacity");
  Topology t(num_channels);
  const auto& nodes = detail::require(j, "nodes", where);
  if (!nodes.is_array()) throw FormatError(where + ": nodes must be an array");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& n = nodes[k];
    const std::string w = where + ".nodes[" + std::to_string(k) + "]";
    const auto& id = detail::require(n, "id", w);
    if (!detail::is_index(id) || id.get<std::size_t>() != k)
      throw FormatError(w + ": ids must be dense and in order");
    std::optional<Point> pos;
    if (n.contains("pos")) pos = detail::point_from(n.at("pos"), w);
    t.add_node(detail::channels_from(detail::require(n, "channels", w), num_channels, w), pos);
  }
  if (j.contains("edges")) {
    const auto& edges = j.at("edges");
    if (!edges.is_array()) throw FormatError(where + ": edges must be an array");
    for (const auto& e : edges) {
      if (!e.is_array() || e.size() != 2 || !detail::is_index(e[0]) || !detail::is_index(e[1]))
        throw FormatError(where + ": each edge must be [i, j]");
      const auto a = e[0].get<std::size_t>(), b = e[1].get<std::size_t>();
      if (a >= t.size() || b >= t.size()) throw FormatError(where + ": edge references an unknown node");
      try {
        t.add_edge(static_cast<NodeId>(a), static_cast<NodeId>(b));
      } catch (const std::invalid_argument& ex) {
        throw FormatError(where + ": " + ex.what());
      }
    }
  } else {
    if (j.contains("cr_range")) range = j.at("cr_range").get<double>();
    if (t.size() > 0 && (!t.has_positions() || !range))
      throw FormatError(where + ": without edges, every node needs pos and the document needs cr_range");
    if (range) t.derive_unit_disk_edges(*range);
  }
  return t;
}

/// A scenario document is a topology document with the generating config and
/// primary users alongside.
inline json to_json(const ScenarioState& s) {
  json j = to_json(s.topology);
  j["cr_range"] = s.config.cr_range;
  j["config"] = to_config_text(s.config);
  json pus = json::array();
  for (const auto& p : s.pus)
    pus.push_back({{"pos", {p.pos.x, p.pos.y}}, {"range", p.range}, {"channels", detail::channels_json(p.active_channels)}});
  j["pus"] = std::move(pus);
  return j;
}

struct ScenarioDoc {
  Topology topology;
  std::optional<ScenarioConfig> config;
  std::vector<PrimaryUser> pus;
};

inline ScenarioDoc scenario_from_json(const json& j) {
  ScenarioDoc d;
  d.topology = topology_from_json(j);
  if (j.contains("config")) {
    std::istringstream in(j.at("config").get<std::string>());
    d.config = parse_config(in);
  }
  if (j.contains("pus")) {
    for (const auto& p : j.at("pus")) {
      PrimaryUser pu;
      pu.pos = detail::point_from(detail::require(p, "pos", "pus"), "pus");
      pu.range = detail::require(p, "range", "pus").get<double>();
      pu.active_channels = detail::channels_from(detail::require(p, "channels", "pus"), d.topology.num_channels(), "pus");
      d.pus.push_back(pu);
    }
  }
  return d;
}

inline json to_json(const MessageCounter& m) {
  return json{{"head_broadcasts", m.head_broadcasts},
              {"member_updates", m.member_updates},
              {"affiliation", m.affiliation},
              {"composition", m.composition},
              {"total", m.total()}};
}

struct ClusteringDoc {
  Topology topology;
  Clustering clustering;
  std::string scheme;
  std::optional<MessageCounter> messages;
};

/// The clustering document embeds its topology so it can be validated alone.
inline json to_json(const ClusteringDoc& d) {
  json clusters = json::array();
  for (const auto& c : d.clustering.clusters)
    clusters.push_back({{"head", c.head}, {"members", c.members}, {"cc", detail::channels_json(c.cc)}});
  json j{{"scheme", d.scheme}, {"topology", to_json(d.topology)}, {"clusters", std::move(clusters)}};
  if (d.messages) j["messages"] = to_json(*d.messages);
  return j;
}

/// Cached cc values are read as written, so a stale cache in the file shows
/// up in validation rather than being silently recomputed.
inline ClusteringDoc clustering_from_json(const json& j) {
  ClusteringDoc d;
  d.topology = topology_from_json(detail::require(j, "topology", "clustering"));
  if (j.contains("scheme")) d.scheme = j.at("scheme").get<std::string>();
  const auto& clusters = detail::require(j, "clusters", "clustering");
  if (!clusters.is_array()) throw FormatError("clustering: clusters must be an array");
  for (const auto& c : clusters) {
    Cluster cl;
    const auto& head = detail::require(c, "head", "cluster");
    const auto& members = detail::require(c, "members", "cluster");
    if (!detail::is_index(head) || !members.is_array() ||
        !std::all_of(members.begin(), members.end(), detail::is_index))
      throw FormatError("cluster: head and members must be node ids");
    cl.head = head.get<NodeId>();
    cl.members = members.get<std::vector<NodeId>>();
    std::sort(cl.members.begin(), cl.members.end());
    if (c.contains("cc")) {
      cl.cc = detail::channels_from(c.at("cc"), d.topology.num_channels(), "cluster");
    } else {
      bool known = !cl.members.empty();
      for (auto m : cl.members) known = known && m < d.topology.size();
      if (known) cl.refresh(d.topology);
    }
    d.clustering.clusters.push_back(std::move(cl));
  }
  if (j.contains("messages")) {
    const auto& m = j.at("messages");
    MessageCounter mc;
    mc.head_broadcasts = m.value("head_broadcasts", std::size_t{0});
    mc.member_updates = m.value("member_updates", std::size_t{0});
    mc.affiliation = m.value("affiliation", std::size_t{0});
    mc.composition = m.value("composition", std::size_t{0});
    d.messages = mc;
  }
  return d;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace crn::io
