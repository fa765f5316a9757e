#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "crn/cluster.hpp"
#include "crn/topology.hpp"

namespace crn {

/// Control-message tallies. Phase I fills the first two, phase II the rest.
struct MessageCounter {
  std::size_t head_broadcasts = 0;  // cluster creation or composition change
  std::size_t member_updates = 0;   // a member announcing its sentinel degree
  std::size_t affiliation = 0;      // a debatable node announcing its choice
  std::size_t composition = 0;      // a claiming head announcing a changed cluster

  std::size_t total() const { return head_broadcasts + member_updates + affiliation + composition; }

  MessageCounter& operator+=(const MessageCounter& o) {
    head_broadcasts += o.head_broadcasts;
    member_updates += o.member_updates;
    affiliation += o.affiliation;
    composition += o.composition;
    return *this;
  }
  friend bool operator==(const MessageCounter&, const MessageCounter&) = default;
};

// -- Head election -----------------------------------------------------------

/// What a node advertises for the election comparison.
struct ElectionKey {
  std::size_t d = 0;  // sentinel M once the node is a member
  std::size_t g = 0;
  NodeId id = 0;
};

/// Strict preference: smaller d, then larger g, then smaller ID.
inline bool precedes(const ElectionKey& a, const ElectionKey& b) {
  if (a.d != b.d) return a.d < b.d;
  if (a.g != b.g) return a.g > b.g;
  return a.id < b.id;
}

enum class Election { Head, NotHead };

/// `rivals` are the node's neighbours that are not cluster heads.
inline Election head_election_step(const ElectionKey& self, std::span<const ElectionKey> rivals) {
  for (const auto& r : rivals)
    if (!precedes(self, r)) return Election::NotHead;
  return Election::Head;
}

// -- Cluster control (CC guarantee and size pruning) ---------------------------

/// t as an exact fraction num/den, so that |C| > t*delta never depends on
/// floating-point rounding of the product.
struct SizeThreshold {
  std::int64_t num = 13;
  std::int64_t den = 10;
  std::size_t delta = 1;

  static SizeThreshold from(double t_factor, std::size_t delta) {
    constexpr std::int64_t kDen = 1'000'000;
    return SizeThreshold{std::llround(t_factor * kDen), kDen, delta};
  }

  bool exceeded_by(std::size_t size) const {
    return static_cast<std::int64_t>(size) * den > num * static_cast<std::int64_t>(delta);
  }

  /// floor(t * delta), the largest size that passes.
  std::size_t limit() const {
    return static_cast<std::size_t>((num * static_cast<std::int64_t>(delta)) / den);
  }
};

struct PruneResult {
  Cluster cluster;
  std::vector<NodeId> evicted;  // in eviction order
};

namespace detail {

/// Member to drop next: fewest channels shared with the head, then the one
/// whose removal gains the most common channels, then the smaller ID.
inline NodeId next_eviction(const Cluster& c, const Topology& topo) {
  const auto& kh = topo.channels(c.head);
  const auto base = c.cc.size();
  std::optional<NodeId> best;
  std::size_t best_shared = 0, best_gain = 0;
  for (auto m : c.members) {
    if (m == c.head) continue;
    const auto shared = common_channels(kh, topo.channels(m)).size();
    if (best && shared > best_shared) continue;
    ChannelSet without = ChannelSet::full(kMaxChannels);
    for (auto o : c.members)
      if (o != m) without &= topo.channels(o);
    const auto gain = without.size() - base;
    if (!best || shared < best_shared || gain > best_gain) {
      best = m;
      best_shared = shared;
      best_gain = gain;
    }
  }
  return *best;
}

inline void evict(Cluster& c, NodeId m, const Topology& topo, std::vector<NodeId>& log) {
  c.erase(m);
  c.refresh(topo);
  log.push_back(m);
}

}  // namespace detail

/// Drops members until the cluster has a common channel; may end as {head}.
inline PruneResult guarantee_cc(Cluster cluster, const Topology& topo) {
  PruneResult r;
  cluster.refresh(topo);
  while (cluster.cc.empty() && cluster.size() > 1)
    detail::evict(cluster, detail::next_eviction(cluster, topo), topo, r.evicted);
  r.cluster = std::move(cluster);
  return r;
}

/// Drops members while |C| > t * delta, using the same ordering.
inline PruneResult prune_to_size(Cluster cluster, const SizeThreshold& limit, const Topology& topo) {
  if (limit.num * static_cast<std::int64_t>(limit.delta) < limit.den)
    throw std::invalid_argument("size threshold t*delta must be at least 1");
  PruneResult r;
  cluster.refresh(topo);
  while (limit.exceeded_by(cluster.size()) && cluster.size() > 1)
    detail::evict(cluster, detail::next_eviction(cluster, topo), topo, r.evicted);
  r.cluster = std::move(cluster);
  return r;
}

inline PruneResult prune_to_size(Cluster cluster, double t_factor, std::size_t delta,
                                 const Topology& topo) {
  return prune_to_size(std::move(cluster), SizeThreshold::from(t_factor, delta), topo);
}

/// l^2 / r^2: heads end up roughly one range apart on a grid.
inline double estimate_max_clusters(double area_side, double range) {
  if (!(range > 0.0)) throw std::invalid_argument("range must be positive");
  return (area_side * area_side) / (range * range);
}

// -- Phase I state machine ----------------------------------------------------

enum class Role : std::uint8_t { Undecided, Head, Member };

struct Phase1Options {
  std::optional<SizeThreshold> size_control;
};

struct Phase1State {
  std::vector<Role> role;
  std::vector<ConnectivityVector> connectivity;  // true (d, g) per node
  std::size_t sentinel = 0;                      // M = |K| * N + 1
  Clustering clusters;                           // one per head, may overlap
  std::vector<std::size_t> pass_steps;           // election decisions per pass
  std::size_t step_counter = 0;
  std::size_t evictions = 0;
  MessageCounter messages;

  std::size_t size() const { return role.size(); }

  ElectionKey key(NodeId i) const {
    const auto d = role[i] == Role::Member ? sentinel : connectivity[i].d;
    return ElectionKey{d, connectivity[i].g, i};
  }

  std::vector<NodeId> heads() const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < role.size(); ++i)
      if (role[i] == Role::Head) out.push_back(i);
    return out;
  }

  /// Nodes claimed by two or more clusters.
  std::vector<NodeId> debatable() const {
    std::vector<NodeId> out;
    const auto aff = clusters.affiliations(size());
    for (NodeId i = 0; i < aff.size(); ++i)
      if (aff[i].size() > 1) out.push_back(i);
    return out;
  }

  std::size_t cluster_count_of(NodeId i) const {
    std::size_t n = 0;
    for (const auto& c : clusters.clusters) n += c.contains(i) ? 1 : 0;
    return n;
  }
};

inline Phase1State init_phase1(const Topology& topo) {
  Phase1State st;
  st.role.assign(topo.size(), Role::Undecided);
  st.connectivity.reserve(topo.size());
  for (NodeId i = 0; i < topo.size(); ++i) st.connectivity.push_back(connectivity_vector(topo, i));
  st.sentinel = topo.num_channels() * topo.size() + 1;
  return st;
}

namespace detail {

/// Rounds of ascending-ID activation until no undecided node remains.
/// Returns the index of the first cluster created in this pass.
inline std::size_t election_pass(Phase1State& st, const Topology& topo) {
  const auto first_new = st.clusters.size();
  std::size_t steps = 0;
  std::vector<ElectionKey> rivals;
  bool progress = true;
  while (progress) {
    progress = false;
    for (NodeId i = 0; i < topo.size(); ++i) {
      if (st.role[i] != Role::Undecided) continue;
      rivals.clear();
      for (auto j : topo.neighbors(i))
        if (st.role[j] != Role::Head) rivals.push_back(st.key(j));
      if (head_election_step(st.key(i), rivals) != Election::Head) continue;

      st.role[i] = Role::Head;
      ++steps;
      ++st.messages.head_broadcasts;
      std::vector<NodeId> members{i};
      for (auto j : topo.neighbors(i)) {
        if (st.role[j] == Role::Head) continue;
        members.push_back(j);
        if (st.role[j] == Role::Undecided) {
          st.role[j] = Role::Member;
          ++steps;
          ++st.messages.member_updates;
        }
      }
      st.clusters.clusters.push_back(Cluster::make(i, std::move(members), topo));
      progress = true;
    }
  }
  // The globally smallest undecided key always wins, so a pass never stalls.
  if (std::find(st.role.begin(), st.role.end(), Role::Undecided) != st.role.end())
    throw std::logic_error("election pass ended with undecided nodes");
  st.pass_steps.push_back(steps);
  st.step_counter += steps;
  return first_new;
}

}  // namespace detail

/// One eviction-free election pass from scratch: every node ends as a head or
/// a member of at least one cluster. Common channels are not enforced yet.
inline Phase1State run_phase1(const Topology& topo) {
  auto st = init_phase1(topo);
  detail::election_pass(st, topo);
  return st;
}

/**
 * Applies the CC guarantee and, when configured, size pruning to the
 * clusters at index >= `from`. Evicted nodes left without any cluster fall
 * back to Undecided (their true degree is restored). Returns every evicted
 * node, in eviction order, with repeats when a node left several clusters.
 */
inline std::vector<NodeId> apply_cluster_control(Phase1State& st, const Topology& topo,
                                                 const Phase1Options& opts, std::size_t from = 0) {
  std::vector<NodeId> evicted;
  for (std::size_t k = from; k < st.clusters.size(); ++k) {
    auto& c = st.clusters.clusters[k];
    auto r = guarantee_cc(c, topo);
    if (opts.size_control) {
      auto p = prune_to_size(std::move(r.cluster), *opts.size_control, topo);
      r.cluster = std::move(p.cluster);
      r.evicted.insert(r.evicted.end(), p.evicted.begin(), p.evicted.end());
    }
    if (r.evicted.empty()) continue;
    c = std::move(r.cluster);
    ++st.messages.head_broadcasts;
    st.evictions += r.evicted.size();
    evicted.insert(evicted.end(), r.evicted.begin(), r.evicted.end());
  }
  for (auto e : evicted)
    if (st.role[e] == Role::Member && st.cluster_count_of(e) == 0) st.role[e] = Role::Undecided;
  return evicted;
}

/// Evicted, cluster-less nodes re-run the election. New heads may sit inside
/// existing heads' neighbourhoods. Returns the index of the first new cluster.
inline std::size_t reintegrate(std::span<const NodeId> evicted, Phase1State& st, const Topology& topo) {
  bool any = false;
  for (auto e : evicted) {
    if (st.role[e] == Role::Member && st.cluster_count_of(e) == 0) st.role[e] = Role::Undecided;
    any = any || st.role[e] == Role::Undecided;
  }
  if (!any) return st.clusters.size();
  return detail::election_pass(st, topo);
}

/// Full phase I: election, cluster control, and reintegration until every
/// node is covered and every cluster satisfies the control rules.
inline Phase1State form_clusters(const Topology& topo, const Phase1Options& opts = {}) {
  auto st = init_phase1(topo);
  std::size_t from = detail::election_pass(st, topo);
  for (;;) {
    const auto evicted = apply_cluster_control(st, topo, opts, from);
    const auto before = st.clusters.size();
    from = reintegrate(evicted, st, topo);
    if (from == before && st.clusters.size() == before) break;
  }
  return st;
}

}  // namespace crn
