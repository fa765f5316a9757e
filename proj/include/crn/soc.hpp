#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "crn/cluster.hpp"
#include "crn/config.hpp"
#include "crn/ross.hpp"
#include "crn/topology.hpp"

namespace crn {

/**
 * Approximation of the SOC baseline: a
 * greedy formation round followed by two join-or-merge rounds, all driven by
 * |K(C)| * |C|. Clusters keep the one-hop definition throughout; multi-hop
 * merges are never formed.
 */
struct SocState {
  std::vector<std::vector<NodeId>> clusters;  // slots may become empty after merges
  std::vector<std::size_t> cluster_of;
  std::size_t round = 0;
  MessageCounter messages;  // one affiliation broadcast per node per round

  Clustering clustering(const Topology& topo) const;
};

namespace detail {

inline std::size_t soc_metric(const ChannelSet& cc, std::size_t size) { return cc.size() * size; }

inline ChannelSet soc_cc(const std::vector<NodeId>& members, const Topology& topo) {
  return members.empty() ? ChannelSet{} : cluster_cc(members, topo);
}

/// Smallest-ID member adjacent to every other member.
inline std::optional<NodeId> soc_head(const std::vector<NodeId>& members, const Topology& topo) {
  for (auto h : members) {
    const bool ok = std::all_of(members.begin(), members.end(),
                                [&](NodeId m) { return m == h || topo.adjacent(h, m); });
    if (ok) return h;
  }
  return std::nullopt;
}

inline std::vector<NodeId> merged(std::vector<NodeId> a, const std::vector<NodeId>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

/// Round 1: nodes in ascending ID grow a cluster from themselves over their
/// still-unassigned neighbours, each addition strictly improving the metric.
inline void soc_form(SocState& s, const Topology& topo) {
  constexpr auto kNone = static_cast<std::size_t>(-1);
  s.cluster_of.assign(topo.size(), kNone);
  for (NodeId i = 0; i < topo.size(); ++i) {
    if (s.cluster_of[i] != kNone) continue;
    std::vector<NodeId> members{i};
    ChannelSet cc = topo.channels(i);
    for (;;) {
      std::optional<NodeId> pick;
      auto best = soc_metric(cc, members.size());
      for (auto j : topo.neighbors(i)) {
        if (s.cluster_of[j] != kNone || std::find(members.begin(), members.end(), j) != members.end()) continue;
        // Every member is a neighbour of i, so i stays a valid head.
        const auto m = soc_metric(cc & topo.channels(j), members.size() + 1);
        if (m > best) {
          best = m;
          pick = j;
        }
      }
      if (!pick) break;
      members.push_back(*pick);
      cc &= topo.channels(*pick);
    }
    std::sort(members.begin(), members.end());
    for (auto m : members) s.cluster_of[m] = s.clusters.size();
    s.clusters.push_back(std::move(members));
  }
  s.messages.affiliation += topo.size();
}

/// Rounds 2 and 3: each node may move into an adjacent cluster or merge its
/// cluster with one. Among the options the acceptance rule admits, the one
/// with the largest resulting metric is taken; ties go to the earlier
/// smaller-head cluster, join before merge.
inline void soc_refine(SocState& s, const Topology& topo, SocAcceptance rule) {
  using Metric = long long;
  auto metric = [&](const std::vector<NodeId>& m) {
    return static_cast<Metric>(soc_metric(soc_cc(m, topo), m.size()));
  };
  for (NodeId i = 0; i < topo.size(); ++i) {
    const auto own = s.cluster_of[i];
    const auto cur = s.clusters[own];
    const auto cur_metric = metric(cur);
    enum class Move { None, Join, Merge } move = Move::None;
    std::size_t target = 0;
    Metric best = rule == SocAcceptance::OwnCluster ? cur_metric : std::numeric_limits<Metric>::min();

    std::vector<NodeId> rest;
    for (auto m : cur)
      if (m != i) rest.push_back(m);
    const bool can_leave = rest.empty() || soc_head(rest, topo).has_value();

    std::vector<std::size_t> adjacent;
    for (auto j : topo.neighbors(i))
      if (s.cluster_of[j] != own) adjacent.push_back(s.cluster_of[j]);
    std::sort(adjacent.begin(), adjacent.end(), [&](std::size_t a, std::size_t b) {
      return s.clusters[a].front() < s.clusters[b].front();
    });
    adjacent.erase(std::unique(adjacent.begin(), adjacent.end()), adjacent.end());

    auto consider = [&](const std::vector<NodeId>& result, Metric before, Metric after, Metric other, Move m,
                        std::size_t k) {
      if (!soc_head(result, topo)) return;
      if (rule == SocAcceptance::Welfare && after <= before) return;
      if (rule == SocAcceptance::Consent && metric(result) <= std::max(cur_metric, other)) return;
      const auto value = metric(result);
      if (value > best) {
        best = value;
        move = m;
        target = k;
      }
    };
    for (auto k : adjacent) {
      const auto& other = s.clusters[k];
      const auto other_metric = metric(other);
      if (can_leave) {
        const auto joined = merged(other, {i});
        consider(joined, cur_metric + other_metric, metric(rest) + metric(joined), other_metric, Move::Join, k);
      }
      const auto both = merged(other, cur);
      consider(both, cur_metric + other_metric, metric(both), other_metric, Move::Merge, k);
    }

    if (move == Move::Join) {
      s.clusters[own] = std::move(rest);
      s.clusters[target] = merged(s.clusters[target], {i});
      s.cluster_of[i] = target;
    } else if (move == Move::Merge) {
      s.clusters[target] = merged(s.clusters[target], s.clusters[own]);
      for (auto m : s.clusters[own]) s.cluster_of[m] = target;
      s.clusters[own].clear();
    }
  }
  s.messages.affiliation += topo.size();
}

}  // namespace detail

inline Clustering SocState::clustering(const Topology& topo) const {
  Clustering out;
  for (const auto& members : clusters) {
    if (members.empty()) continue;
    out.clusters.push_back(Cluster::make(*detail::soc_head(members, topo), members, topo));
  }
  out.sort_by_head();
  return out;
}

inline SocState run_soc_detailed(const Topology& topo, SocAcceptance rule = SocAcceptance::Consent) {
  SocState s;
  s.round = 1;
  detail::soc_form(s, topo);
  for (s.round = 2; s.round <= 3; ++s.round) detail::soc_refine(s, topo, rule);
  s.round = 3;
  return s;
}

inline Clustering run_soc(const Topology& topo, SocAcceptance rule = SocAcceptance::Consent) {
  return run_soc_detailed(topo, rule).clustering(topo);
}

}  // namespace crn
