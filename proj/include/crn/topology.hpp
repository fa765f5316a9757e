#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crn/channel_set.hpp"

namespace crn {

/// Dense node index in [0, N). Also the tie-break key wherever the protocol
/// prefers the smaller node ID.
using NodeId = std::uint32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Node {
  NodeId id = 0;
  std::optional<Point> pos;
  ChannelSet channels;
};

/**
 * CR node set with per-node channel availability and a symmetric,
 * irreflexive adjacency. Every edge joins two nodes that share at least one
 * channel. Generated topologies carry positions and derive adjacency from the
 * unit-disk rule; fixture topologies carry explicit edges and no positions.
 */
class Topology {
 public:
  Topology() = default;

  explicit Topology(std::size_t num_channels) : num_channels_(num_channels) {
    if (num_channels > kMaxChannels)
      throw std::invalid_argument("num_channels exceeds ChannelSet capacity");
  }

  std::size_t size() const { return nodes_.size(); }
  std::size_t num_channels() const { return num_channels_; }

  NodeId add_node(ChannelSet channels, std::optional<Point> pos = std::nullopt) {
    if (channels.extent() > num_channels_)
      throw std::invalid_argument("node channel index outside [0, num_channels)");
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(Node{id, pos, channels});
    for (auto& row : adj_) row.push_back(0);
    adj_.emplace_back(nodes_.size(), 0);
    neighbors_.emplace_back();
    return id;
  }

  /// Adds edge {a, b}; rejects self-loops and pairs without a shared channel.
  void add_edge(NodeId a, NodeId b) {
    check(a);
    check(b);
    if (a == b) throw std::invalid_argument("self-loop on node " + std::to_string(a));
    if (common_channels(nodes_[a].channels, nodes_[b].channels).empty())
      throw std::invalid_argument("edge " + std::to_string(a) + "-" + std::to_string(b) +
                                  " joins nodes without a common channel");
    if (adj_[a][b]) return;
    adj_[a][b] = adj_[b][a] = 1;
    insert_sorted(neighbors_[a], b);
    insert_sorted(neighbors_[b], a);
  }

  void clear_edges() {
    for (auto& row : adj_) std::fill(row.begin(), row.end(), 0);
    for (auto& nb : neighbors_) nb.clear();
  }

  /// Rebuilds adjacency: {i,j} is an edge iff d(i,j) < range and K_i and K_j
  /// intersect. All nodes must carry positions.
  void derive_unit_disk_edges(double range) {
    clear_edges();
    for (NodeId i = 0; i < size(); ++i) {
      if (!nodes_[i].pos) throw std::logic_error("unit-disk adjacency needs node positions");
      for (NodeId j = i + 1; j < size(); ++j) {
        if (!nodes_[j].pos) throw std::logic_error("unit-disk adjacency needs node positions");
        if (distance(*nodes_[i].pos, *nodes_[j].pos) < range &&
            !common_channels(nodes_[i].channels, nodes_[j].channels).empty())
          add_edge(i, j);
      }
    }
  }

  bool adjacent(NodeId a, NodeId b) const { return a < size() && b < size() && adj_[a][b]; }
  std::span<const NodeId> neighbors(NodeId i) const { return neighbors_.at(i); }
  const ChannelSet& channels(NodeId i) const { return nodes_.at(i).channels; }
  const Node& node(NodeId i) const { return nodes_.at(i); }
  std::span<const Node> nodes() const { return nodes_; }

  /// Replaces a node's availability. Existing edges are left alone; callers
  /// re-derive adjacency afterwards.
  void set_channels(NodeId i, ChannelSet channels) {
    check(i);
    if (channels.extent() > num_channels_)
      throw std::invalid_argument("node channel index outside [0, num_channels)");
    nodes_[i].channels = channels;
  }

  bool has_positions() const {
    return !nodes_.empty() && std::all_of(nodes_.begin(), nodes_.end(),
                                          [](const Node& n) { return n.pos.has_value(); });
  }

  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (NodeId i = 0; i < size(); ++i)
      for (auto j : neighbors_[i])
        if (i < j) out.emplace_back(i, j);
    return out;
  }

  std::size_t num_edges() const {
    std::size_t e = 0;
    for (const auto& nb : neighbors_) e += nb.size();
    return e / 2;
  }

  friend bool operator==(const Topology& a, const Topology& b) {
    if (a.num_channels_ != b.num_channels_ || a.size() != b.size()) return false;
    for (NodeId i = 0; i < a.size(); ++i) {
      if (a.nodes_[i].pos != b.nodes_[i].pos || a.nodes_[i].channels != b.nodes_[i].channels)
        return false;
    }
    return a.neighbors_ == b.neighbors_;
  }

 private:
  void check(NodeId i) const {
    if (i >= size()) throw std::out_of_range("node id " + std::to_string(i) + " out of range");
  }

  static void insert_sorted(std::vector<NodeId>& v, NodeId x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
  }

  std::size_t num_channels_ = 10;
  std::vector<Node> nodes_;
  std::vector<std::vector<std::uint8_t>> adj_;
  std::vector<std::vector<NodeId>> neighbors_;
};

}  // namespace crn
