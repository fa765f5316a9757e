#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "crn/channel_set.hpp"
#include "crn/topology.hpp"

namespace crn {

/// Intersection of K_i over `members`. A singleton yields that node's set.
inline ChannelSet cluster_cc(std::span<const NodeId> members, const Topology& topo) {
  if (members.empty()) throw std::invalid_argument("cluster_cc of an empty member set");
  ChannelSet cc = topo.channels(members.front());
  for (auto m : members.subspan(1)) cc &= topo.channels(m);
  return cc;
}

/// Head plus members; `members` is sorted and contains the head. `cc` caches
/// the common-channel set and is refreshed by refresh().
struct Cluster {
  NodeId head = 0;
  std::vector<NodeId> members;
  ChannelSet cc;

  static Cluster make(NodeId head, std::vector<NodeId> members, const Topology& topo) {
    if (std::find(members.begin(), members.end(), head) == members.end()) members.push_back(head);
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    Cluster c{head, std::move(members), {}};
    c.refresh(topo);
    return c;
  }

  void refresh(const Topology& topo) { cc = cluster_cc(members, topo); }

  std::size_t size() const { return members.size(); }
  bool contains(NodeId i) const { return std::binary_search(members.begin(), members.end(), i); }

  void erase(NodeId i) {
    auto it = std::lower_bound(members.begin(), members.end(), i);
    if (it != members.end() && *it == i) members.erase(it);
  }

  void insert(NodeId i) {
    auto it = std::lower_bound(members.begin(), members.end(), i);
    if (it == members.end() || *it != i) members.insert(it, i);
  }

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct Clustering {
  std::vector<Cluster> clusters;

  std::size_t size() const { return clusters.size(); }

  /// Clusters ordered by head ID, for stable output and comparisons.
  void sort_by_head() {
    std::sort(clusters.begin(), clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.head < b.head; });
  }

  const Cluster* find_by_head(NodeId h) const {
    for (const auto& c : clusters)
      if (c.head == h) return &c;
    return nullptr;
  }

  /// For each node, the heads of every cluster containing it.
  std::vector<std::vector<NodeId>> affiliations(std::size_t num_nodes) const {
    std::vector<std::vector<NodeId>> out(num_nodes);
    for (const auto& c : clusters)
      for (auto m : c.members)
        if (m < num_nodes) out[m].push_back(c.head);
    return out;
  }

  friend bool operator==(const Clustering&, const Clustering&) = default;
};

/// (d_i, g_i): d_i sums |K_i & K_j| over neighbours; g_i is the size of the
/// intersection over i and all of its neighbours.
struct ConnectivityVector {
  std::size_t d = 0;
  std::size_t g = 0;
  friend bool operator==(const ConnectivityVector&, const ConnectivityVector&) = default;
};

/// g intersects over every neighbour, heads included; head filtering only
/// applies to the election comparison, which lives in ross.hpp.
inline ConnectivityVector connectivity_vector(const Topology& topo, NodeId i) {
  ConnectivityVector v;
  ChannelSet hood = topo.channels(i);
  for (auto j : topo.neighbors(i)) {
    v.d += common_channels(topo.channels(i), topo.channels(j)).size();
    hood &= topo.channels(j);
  }
  v.g = hood.size();
  return v;
}

struct Violation {
  enum class Kind { Overlap, Uncovered, HeadNotMember, NotAdjacentToHead, EmptyCc, UnknownNode, StaleCc };
  Kind kind;
  NodeId node = 0;  // offending node (or head, for cluster-level faults)
  NodeId head = 0;
  std::string message;
};

inline const char* to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::Overlap: return "overlap";
    case Violation::Kind::Uncovered: return "uncovered";
    case Violation::Kind::HeadNotMember: return "head-not-member";
    case Violation::Kind::NotAdjacentToHead: return "not-adjacent-to-head";
    case Violation::Kind::EmptyCc: return "empty-cc";
    case Violation::Kind::UnknownNode: return "unknown-node";
    case Violation::Kind::StaleCc: return "stale-cc";
  }
  return "?";
}

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  std::size_t count(Violation::Kind k) const {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [k](const Violation& v) { return v.kind == k; }));
  }

  std::string summary() const {
    std::string out;
    for (const auto& v : violations) out += std::string(to_string(v.kind)) + ": " + v.message + "\n";
    return out;
  }
};

/**
 * Checks a clustering against the cluster definition. With
 * `require_partition`, every node must appear in exactly one cluster;
 * otherwise overlaps are allowed but every node must still be covered.
 * Non-singleton clusters must have a non-empty common-channel set.
 */
inline ValidationReport validate_clustering(const Clustering& c, const Topology& topo,
                                            bool require_partition) {
  ValidationReport rep;
  auto add = [&](Violation::Kind k, NodeId node, NodeId head, std::string msg) {
    rep.violations.push_back(Violation{k, node, head, std::move(msg)});
  };
  std::vector<std::size_t> cover(topo.size(), 0);
  for (const auto& cl : c.clusters) {
    const auto h = std::to_string(cl.head);
    bool known = true;
    for (auto m : cl.members) {
      if (m >= topo.size()) {
        add(Violation::Kind::UnknownNode, m, cl.head, "cluster " + h + " lists unknown node " + std::to_string(m));
        known = false;
        continue;
      }
      ++cover[m];
      if (m != cl.head && !topo.adjacent(m, cl.head))
        add(Violation::Kind::NotAdjacentToHead, m, cl.head,
            "node " + std::to_string(m) + " is not adjacent to head " + h);
    }
    if (!cl.contains(cl.head))
      add(Violation::Kind::HeadNotMember, cl.head, cl.head, "head " + h + " missing from its cluster");
    if (!known || cl.members.empty()) continue;
    const auto cc = cluster_cc(cl.members, topo);
    if (cl.members.size() > 1 && cc.empty())
      add(Violation::Kind::EmptyCc, cl.head, cl.head, "cluster " + h + " has no common channel");
    if (cc != cl.cc)
      add(Violation::Kind::StaleCc, cl.head, cl.head, "cluster " + h + " caches a stale common-channel set");
  }
  for (NodeId i = 0; i < topo.size(); ++i) {
    if (cover[i] == 0)
      add(Violation::Kind::Uncovered, i, i, "node " + std::to_string(i) + " is in no cluster");
    else if (require_partition && cover[i] > 1)
      add(Violation::Kind::Overlap, i, i,
          "node " + std::to_string(i) + " is in " + std::to_string(cover[i]) + " clusters");
  }
  return rep;
}

}  // namespace crn
