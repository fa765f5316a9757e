#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "crn/cluster.hpp"
#include "crn/ross.hpp"
#include "crn/topology.hpp"

namespace crn {

/// |K(C \ {i})| - |K(C)|; how many common channels C gains if i leaves.
inline std::size_t departure_gain(const Cluster& c, NodeId i, const Topology& topo) {
  if (!c.contains(i))
    throw std::invalid_argument("node " + std::to_string(i) + " is not in cluster " + std::to_string(c.head));
  ChannelSet without = ChannelSet::full(kMaxChannels);
  bool any = false;
  for (auto m : c.members) {
    if (m == i) continue;
    without &= topo.channels(m);
    any = true;
  }
  const auto with = cluster_cc(c.members, topo).size();
  return any ? without.size() - with : 0;
}

/// Lexicographic cost of i staying in C; smaller is better. The head-ID
/// component makes the order total.
struct StayCost {
  std::size_t gain = 0;
  std::size_t neg_head_shared = 0;  // stored as (cap - shared) so smaller is better
  std::size_t size = 0;
  NodeId head = 0;

  friend auto operator<=>(const StayCost& a, const StayCost& b) {
    return std::tie(a.gain, a.neg_head_shared, a.size, a.head) <=>
           std::tie(b.gain, b.neg_head_shared, b.size, b.head);
  }
  friend bool operator==(const StayCost&, const StayCost&) = default;
};

/// `c` must contain i (the composition as if i stays there).
inline StayCost stay_cost(const Cluster& c, NodeId i, const Topology& topo) {
  const auto shared = common_channels(topo.channels(c.head), topo.channels(i)).size();
  return StayCost{departure_gain(c, i, topo), kMaxChannels - shared, c.size(), c.head};
}

/**
 * Index into `claiming` of the cluster i should stay in: least departure
 * gain, then the head sharing most channels with i, then the smallest
 * cluster, then the smaller head ID. Every entry must contain i.
 */
inline std::size_t choose_cluster(NodeId i, std::span<const Cluster> claiming, const Topology& topo) {
  if (claiming.empty()) throw std::invalid_argument("node " + std::to_string(i) + " has no claiming cluster");
  std::size_t best = 0;
  auto best_cost = stay_cost(claiming[0], i, topo);
  for (std::size_t k = 1; k < claiming.size(); ++k) {
    const auto cost = stay_cost(claiming[k], i, topo);
    if (cost < best_cost) {
      best = k;
      best_cost = cost;
    }
  }
  return best;
}

struct Response {
  NodeId player = 0;
  std::optional<NodeId> from_head;  // empty for a first affiliation
  NodeId to_head = 0;
  std::size_t round = 0;
};

/**
 * Membership clarification as a player-specific singleton congestion game.
 * Players are the debatable nodes; resources are their claiming clusters.
 * `base` holds every claiming cluster with all players removed; a player's
 * presence is counted only in the cluster it currently occupies.
 */
struct GameState {
  std::vector<NodeId> players;                  // ascending
  std::vector<std::vector<std::size_t>> strategies;  // per player: indices into base
  std::vector<std::optional<std::size_t>> assignment;
  std::vector<Cluster> base;
  std::vector<Response> response_log;
  std::size_t rounds = 0;
  MessageCounter messages;

  std::size_t num_resources() const {
    std::vector<std::size_t> all;
    for (const auto& s : strategies) all.insert(all.end(), s.begin(), s.end());
    std::sort(all.begin(), all.end());
    return static_cast<std::size_t>(std::unique(all.begin(), all.end()) - all.begin());
  }

  /// n^2 * m best-response bound for singleton congestion games.
  std::size_t step_bound() const { return players.size() * players.size() * num_resources(); }

  /// Cluster k as currently occupied, plus `extra` when given.
  Cluster composition(std::size_t k, const Topology& topo, std::optional<NodeId> extra = std::nullopt) const {
    Cluster c = base[k];
    for (std::size_t p = 0; p < players.size(); ++p)
      if (assignment[p] == k) c.insert(players[p]);
    if (extra) c.insert(*extra);
    c.refresh(topo);
    return c;
  }

  /// Player p's options against the current occupation; each contains p.
  std::vector<Cluster> options(std::size_t p, const Topology& topo) const {
    std::vector<Cluster> out;
    out.reserve(strategies[p].size());
    for (auto k : strategies[p]) out.push_back(composition(k, topo, players[p]));
    return out;
  }

  Clustering clustering(const Topology& topo) const {
    Clustering out;
    for (std::size_t k = 0; k < base.size(); ++k) out.clusters.push_back(composition(k, topo));
    out.sort_by_head();
    return out;
  }
};

/// Splits phase-I clusters into the game: players, strategy sets, and the
/// player-free base compositions.
inline GameState make_game(const Clustering& phase1, const Topology& topo) {
  GameState g;
  const auto aff = phase1.affiliations(topo.size());
  std::vector<std::optional<std::size_t>> player_index(topo.size());
  for (NodeId i = 0; i < aff.size(); ++i) {
    if (aff[i].size() < 2) continue;
    player_index[i] = g.players.size();
    g.players.push_back(i);
  }
  g.strategies.resize(g.players.size());
  g.assignment.assign(g.players.size(), std::nullopt);
  for (std::size_t k = 0; k < phase1.clusters.size(); ++k) {
    const auto& c = phase1.clusters[k];
    Cluster b{c.head, {}, {}};
    for (auto m : c.members) {
      if (player_index[m]) {
        if (m == c.head) throw std::logic_error("a cluster head is claimed by another cluster");
        g.strategies[*player_index[m]].push_back(k);
      } else {
        b.members.push_back(m);
      }
    }
    b.refresh(topo);
    g.base.push_back(std::move(b));
  }
  return g;
}

class ConvergenceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MembershipResult {
  Clustering clustering;
  GameState game;
};

/**
 * Best-response dynamics. Players are activated in ascending ID order; a
 * round with no change is a pure Nash equilibrium. Each affiliation change
 * costs one broadcast from the player. Composition broadcasts: a first choice
 * changes every other claiming cluster (the player used to sit in all of
 * them); a later switch changes the cluster left and the cluster joined.
 */
inline MembershipResult run_dga(const Clustering& phase1, const Topology& topo) {
  auto g = make_game(phase1, topo);
  const auto bound = g.step_bound();
  bool changed = !g.players.empty();
  while (changed) {
    changed = false;
    ++g.rounds;
    for (std::size_t p = 0; p < g.players.size(); ++p) {
      const auto opts = g.options(p, topo);
      const auto k = g.strategies[p][choose_cluster(g.players[p], opts, topo)];
      if (g.assignment[p] == k) continue;
      const auto from = g.assignment[p];
      g.response_log.push_back(Response{g.players[p], from ? std::optional(g.base[*from].head) : std::nullopt,
                                        g.base[k].head, g.rounds});
      ++g.messages.affiliation;
      g.messages.composition += from ? 2 : g.strategies[p].size() - 1;
      g.assignment[p] = k;
      changed = true;
      if (g.response_log.size() > bound)
        throw ConvergenceError("best-response dynamics exceeded n^2*m = " + std::to_string(bound) + " steps");
    }
  }
  auto clustering = g.clustering(topo);
  return {std::move(clustering), std::move(g)};
}

/// One simultaneous decision per player against the static phase-I
/// compositions. Each claiming cluster that loses a player broadcasts once.
inline MembershipResult run_dfa(const Clustering& phase1, const Topology& topo) {
  auto g = make_game(phase1, topo);
  std::vector<std::size_t> choice(g.players.size());
  for (std::size_t p = 0; p < g.players.size(); ++p) {
    std::vector<Cluster> opts;
    for (auto k : g.strategies[p]) opts.push_back(phase1.clusters[k]);
    choice[p] = g.strategies[p][choose_cluster(g.players[p], opts, topo)];
  }
  std::vector<bool> lost(g.base.size(), false);
  for (std::size_t p = 0; p < g.players.size(); ++p) {
    g.assignment[p] = choice[p];
    g.response_log.push_back(Response{g.players[p], std::nullopt, g.base[choice[p]].head, 1});
    ++g.messages.affiliation;
    for (auto k : g.strategies[p])
      if (k != choice[p]) lost[k] = true;
  }
  g.messages.composition = static_cast<std::size_t>(std::count(lost.begin(), lost.end(), true));
  g.rounds = g.players.empty() ? 0 : 1;
  auto clustering = g.clustering(topo);
  return {std::move(clustering), std::move(g)};
}

/// True iff no player strictly prefers another claiming cluster given the
/// others' current choices.
inline bool is_nash_equilibrium(const GameState& g, const Topology& topo) {
  for (std::size_t p = 0; p < g.players.size(); ++p) {
    if (!g.assignment[p])
      throw std::invalid_argument("player " + std::to_string(g.players[p]) + " is unassigned");
    const auto opts = g.options(p, topo);
    if (g.strategies[p][choose_cluster(g.players[p], opts, topo)] != *g.assignment[p]) return false;
  }
  return true;
}

/// CSV: player,from_head,to_head,round (from_head empty on first choice).
inline void write_response_log_csv(std::ostream& out, const GameState& g) {
  out << "player,from_head,to_head,round\n";
  for (const auto& r : g.response_log) {
    out << r.player << ',';
    if (r.from_head) out << *r.from_head;
    out << ',' << r.to_head << ',' << r.round << '\n';
  }
}

}  // namespace crn
