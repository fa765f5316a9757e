#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "crn/cluster.hpp"
#include "crn/config.hpp"
#include "crn/topology.hpp"

namespace crn {

/// The centralized solver packs node sets into 64-bit masks.
inline constexpr std::size_t kMaxCentralNodes = 64;

class CentralizedError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// -- Penalties and scores ----------------------------------------------------

/// rho1 at size deviation 1, rho2 at deviation 2, rho2 * (k - 1) beyond.
/// All-zero means penalties are disabled.
struct PenaltySchedule {
  double rho1 = 0.4;
  double rho2 = 0.6;

  static PenaltySchedule disabled() { return {0.0, 0.0}; }

  void validate() const {
    const bool off = rho1 == 0.0 && rho2 == 0.0;
    if (!off && !(0.0 < rho1 && rho1 < rho2))
      throw std::invalid_argument("penalties must satisfy 0 < rho1 < rho2");
  }
};

inline double size_penalty(std::size_t size, std::size_t delta, const PenaltySchedule& s) {
  if (size == 0) throw std::invalid_argument("cluster size must be positive");
  const auto k = size > delta ? size - delta : delta - size;
  if (k == 0) return 0.0;
  if (k == 1) return s.rho1;
  if (k == 2) return s.rho2;
  return s.rho2 * static_cast<double>(k - 1);
}

struct ScoreParams {
  std::size_t num_nodes = 0;
  std::size_t delta = 3;
  PenaltySchedule schedule;
  PenaltyScale scale = PenaltyScale::NetworkSize;
};

/// |K(C)| - N * p(|C|): one chosen cluster's share of the (negated) binary
/// program objective, obtained by summing its t_ij over all N nodes.
inline double cluster_score(std::size_t cc_size, std::size_t size, const ScoreParams& p) {
  const double mult = p.scale == PenaltyScale::NetworkSize ? static_cast<double>(p.num_nodes)
                                                           : static_cast<double>(size);
  return static_cast<double>(cc_size) - mult * size_penalty(size, p.delta, p.schedule);
}

// -- Candidate pool ----------------------------------------------------------

using NodeMask = std::uint64_t;

inline NodeMask mask_of(const std::vector<NodeId>& members) {
  NodeMask m = 0;
  for (auto i : members) m |= NodeMask{1} << i;
  return m;
}

struct Candidate {
  NodeId head = 0;
  std::vector<NodeId> members;  // sorted
  NodeMask mask = 0;
  ChannelSet cc;
  double score = 0.0;

  std::size_t size() const { return members.size(); }
};

struct SizeWindow {
  std::size_t lo = 1;
  std::size_t hi = 5;
};

/// [max(1, delta - 2), delta + 2].
inline SizeWindow default_window(std::size_t delta) {
  return SizeWindow{delta > 2 ? delta - 2 : 1, delta + 2};
}

struct CandidatePool {
  std::vector<Candidate> candidates;
  SizeWindow window;

  std::size_t size() const { return candidates.size(); }

  void score(const ScoreParams& p) {
    for (auto& c : candidates) c.score = cluster_score(c.cc.size(), c.size(), p);
  }

  bool has_all_singletons(std::size_t n) const {
    std::vector<bool> seen(n, false);
    for (const auto& c : candidates)
      if (c.size() == 1 && c.members[0] < n) seen[c.members[0]] = true;
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  }
};

namespace detail {

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

inline void check_central_size(const Topology& topo) {
  if (topo.size() > kMaxCentralNodes)
    throw CentralizedError("centralized solver supports at most " + std::to_string(kMaxCentralNodes) +
                           " nodes, got " + std::to_string(topo.size()));
}

}  // namespace detail

/// Upper bound on candidates enumerate_clusters would visit for `window`.
inline double enumeration_estimate(const Topology& topo, const SizeWindow& w) {
  double total = 0.0;
  for (NodeId h = 0; h < topo.size(); ++h)
    for (std::size_t s = std::max<std::size_t>(w.lo, 1); s <= w.hi; ++s)
      total += detail::binomial(topo.neighbors(h).size(), s - 1);
  return total + static_cast<double>(topo.size());
}

/**
 * Every subset S of Nb(h) + {h} containing h with lo <= |S| <= hi (and, if
 * require_cc, K(S) non-empty), emitted once per member set under its
 * smallest feasible head. All singletons are added regardless of the window.
 * Fails before allocating when the estimate exceeds `budget`.
 */
inline CandidatePool enumerate_clusters(const Topology& topo, SizeWindow window, bool require_cc,
                                        double budget = 5e6) {
  detail::check_central_size(topo);
  if (window.lo == 0) throw std::invalid_argument("window lower bound must be at least 1");
  const auto estimate = enumeration_estimate(topo, window);
  if (estimate > budget)
    throw CentralizedError("candidate enumeration would visit ~" + std::to_string(static_cast<long long>(estimate)) +
                           " subsets (worst case 2^N - 1 = " +
                           std::to_string(std::ldexp(1.0, static_cast<int>(topo.size())) - 1.0) +
                           "), over the budget of " + std::to_string(static_cast<long long>(budget)));
  CandidatePool pool;
  pool.window = window;
  std::unordered_set<NodeMask> seen;

  auto emit = [&](NodeId h, std::vector<NodeId> members, const ChannelSet& cc) {
    std::sort(members.begin(), members.end());
    const auto m = mask_of(members);
    if (!seen.insert(m).second) return;
    pool.candidates.push_back(Candidate{h, std::move(members), m, cc, 0.0});
  };

  for (NodeId h = 0; h < topo.size(); ++h) {
    const auto nb = topo.neighbors(h);
    std::vector<NodeId> chosen{h};
    // Depth-first over neighbour subsets in index order; CC only shrinks, so
    // an empty intersection prunes the whole branch when required.
    auto rec = [&](auto&& self, std::size_t start, const ChannelSet& cc) -> void {
      if (chosen.size() >= window.lo && chosen.size() <= window.hi) emit(h, chosen, cc);
      if (chosen.size() >= window.hi) return;
      for (std::size_t k = start; k < nb.size(); ++k) {
        const auto next = cc & topo.channels(nb[k]);
        if (require_cc && next.empty()) continue;
        chosen.push_back(nb[k]);
        self(self, k + 1, next);
        chosen.pop_back();
      }
    };
    rec(rec, 0, topo.channels(h));
  }
  for (NodeId i = 0; i < topo.size(); ++i) emit(i, {i}, topo.channels(i));
  return pool;
}

/// CSV: head,members,cc_size,score with members space-separated.
inline void write_pool_csv(std::ostream& out, const CandidatePool& pool) {
  out << "head,members,cc_size,score\n";
  for (const auto& c : pool.candidates) {
    out << c.head << ',';
    for (std::size_t k = 0; k < c.members.size(); ++k) out << (k ? " " : "") << c.members[k];
    out << ',' << c.cc.size() << ',' << c.score << '\n';
  }
}

// -- Exact solver ------------------------------------------------------------

inline constexpr double kScoreEps = 1e-9;

struct Solution {
  Clustering clustering;
  std::vector<std::size_t> chosen;  // indices into the pool (solve only)
  double score = -std::numeric_limits<double>::infinity();
};

namespace detail {

/// Preference between complete covers: higher score, then fewer clusters,
/// then the lexicographically smaller sorted head list.
inline bool better_cover(double score, std::vector<NodeId> heads, double best_score,
                         std::vector<NodeId> best_heads, bool have_best) {
  if (!have_best) return true;
  if (score > best_score + kScoreEps) return true;
  if (score < best_score - kScoreEps) return false;
  if (heads.size() != best_heads.size()) return heads.size() < best_heads.size();
  std::sort(heads.begin(), heads.end());
  std::sort(best_heads.begin(), best_heads.end());
  return heads < best_heads;
}

}  // namespace detail

/**
 * Maximum-score exact cover of the node set by pool candidates. Depth-first
 * over the lowest uncovered node, trying its candidates best-first; a branch
 * is cut when its score plus every uncovered node's best per-member share
 * falls below the incumbent.
 */
inline Solution solve(const CandidatePool& pool, std::size_t num_nodes) {
  if (num_nodes > kMaxCentralNodes) throw CentralizedError("too many nodes for the exact solver");
  if (num_nodes == 0) return Solution{{}, {}, 0.0};
  const NodeMask all = num_nodes == 64 ? ~NodeMask{0} : (NodeMask{1} << num_nodes) - 1;

  std::vector<std::vector<std::size_t>> by_node(num_nodes);
  std::vector<double> best_share(num_nodes, -std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const auto& c = pool.candidates[k];
    if (c.mask & ~all) throw CentralizedError("pool candidate references a node outside [0, N)");
    const double share = c.score / static_cast<double>(c.size());
    for (auto m : c.members) {
      by_node[m].push_back(k);
      best_share[m] = std::max(best_share[m], share);
    }
  }
  for (std::size_t j = 0; j < num_nodes; ++j)
    if (by_node[j].empty()) throw CentralizedError("infeasible pool: node " + std::to_string(j) + " is in no candidate");
  for (auto& v : by_node)
    std::stable_sort(v.begin(), v.end(), [&](std::size_t a, std::size_t b) {
      return pool.candidates[a].score > pool.candidates[b].score;
    });

  std::vector<std::size_t> chosen, best;
  std::vector<NodeId> best_heads;
  double best_score = 0.0;
  bool have_best = false;

  auto rec = [&](auto&& self, NodeMask covered, double score, double remaining) -> void {
    if (covered == all) {
      std::vector<NodeId> heads;
      for (auto k : chosen) heads.push_back(pool.candidates[k].head);
      if (detail::better_cover(score, heads, best_score, best_heads, have_best)) {
        best = chosen;
        best_heads = std::move(heads);
        best_score = score;
        have_best = true;
      }
      return;
    }
    if (have_best && score + remaining < best_score - kScoreEps) return;
    const auto j = static_cast<std::size_t>(std::countr_one(covered));
    for (auto k : by_node[j]) {
      const auto& c = pool.candidates[k];
      if (c.mask & covered) continue;
      double freed = 0.0;
      for (auto m : c.members) freed += best_share[m];
      chosen.push_back(k);
      self(self, covered | c.mask, score + c.score, remaining - freed);
      chosen.pop_back();
    }
  };
  double remaining = 0.0;
  for (auto s : best_share) remaining += s;
  rec(rec, 0, 0.0, remaining);
  if (!have_best) throw CentralizedError("infeasible pool: no exact cover exists");

  Solution sol;
  sol.score = best_score;
  sol.chosen = best;
  for (auto k : best) {
    const auto& c = pool.candidates[k];
    sol.clustering.clusters.push_back(Cluster{c.head, c.members, c.cc});
  }
  sol.clustering.sort_by_head();
  return sol;
}

/// Enumerate with `window`, score, and solve.
inline Solution solve_topology(const Topology& topo, SizeWindow window, const ScoreParams& params,
                               bool require_cc = true) {
  auto pool = enumerate_clusters(topo, window, require_cc);
  pool.score(params);
  return solve(pool, topo.size());
}

// -- Independent oracle ------------------------------------------------------

inline constexpr std::size_t kMaxOracleNodes = 14;

/**
 * Exhaustive set-partition search (restricted growth strings), sharing no
 * search code with solve(). A block is admissible if it is a singleton, or if
 * lo <= |B| <= hi, some member is adjacent to all others, and (if
 * require_cc) K(B) is non-empty. Ties follow the same preference as solve().
 */
inline Solution brute_force_oracle(const Topology& topo, SizeWindow window, const ScoreParams& params,
                                   bool require_cc = true) {
  const auto n = topo.size();
  if (n > kMaxOracleNodes)
    throw CentralizedError("oracle is limited to " + std::to_string(kMaxOracleNodes) + " nodes");
  Solution best;
  if (n == 0) {
    best.score = 0.0;
    return best;
  }
  struct Block {
    std::vector<NodeId> members;
    ChannelSet cc;
  };
  std::vector<Block> blocks;
  std::vector<NodeId> best_heads;
  bool have_best = false;

  auto head_of = [&](const Block& b) -> std::optional<NodeId> {
    for (auto h : b.members) {
      bool ok = true;
      for (auto m : b.members)
        if (m != h && !topo.adjacent(h, m)) {
          ok = false;
          break;
        }
      if (ok) return h;
    }
    return std::nullopt;
  };

  auto leaf = [&]() {
    double score = 0.0;
    std::vector<NodeId> heads;
    for (const auto& b : blocks) {
      if (b.members.size() > 1 && b.members.size() < window.lo) return;
      const auto h = head_of(b);
      if (!h) return;
      heads.push_back(*h);
      score += cluster_score(b.cc.size(), b.members.size(), params);
    }
    if (detail::better_cover(score, heads, best.score, best_heads, have_best)) {
      have_best = true;
      best.score = score;
      best_heads = heads;
      best.clustering.clusters.clear();
      for (std::size_t k = 0; k < blocks.size(); ++k)
        best.clustering.clusters.push_back(Cluster{heads[k], blocks[k].members, blocks[k].cc});
    }
  };

  auto rec = [&](auto&& self, NodeId v) -> void {
    if (v == n) {
      leaf();
      return;
    }
    // Index access only: the recursion below may grow `blocks`.
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (blocks[b].members.size() + 1 > window.hi) continue;
      const auto cc = blocks[b].cc & topo.channels(v);
      if (require_cc && cc.empty()) continue;
      const auto saved = blocks[b].cc;
      blocks[b].members.push_back(v);
      blocks[b].cc = cc;
      self(self, v + 1);
      blocks[b].members.pop_back();
      blocks[b].cc = saved;
    }
    blocks.push_back(Block{{v}, topo.channels(v)});
    self(self, v + 1);
    blocks.pop_back();
  };
  rec(rec, 0);
  if (!have_best) throw CentralizedError("no admissible partition");
  best.clustering.sort_by_head();
  return best;
}

// -- Literal objective -------------------------------------------------------

/**
 * Evaluates sum_j sum_i w_i * t_ij with t_ij = p_i - q_ij / |C_i| for the
 * selection `chosen` (w_i = 1 iff chosen), after checking both constraint
 * families: every node in exactly one chosen cluster, and x_ij summing to
 * |C_i| * w_i. Throws if the selection violates either.
 */
inline double binary_program_objective(const CandidatePool& pool, const std::vector<std::size_t>& chosen,
                                       std::size_t num_nodes, std::size_t delta, const PenaltySchedule& s) {
  std::vector<int> w(pool.size(), 0);
  for (auto k : chosen) w.at(k) = 1;
  // x_ij = 1 iff node j resides in chosen candidate i.
  std::vector<std::size_t> per_node(num_nodes, 0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    std::size_t row = 0;
    for (auto m : pool.candidates[i].members)
      if (w[i]) {
        ++per_node[m];
        ++row;
      }
    if (row != pool.candidates[i].size() * static_cast<std::size_t>(w[i]))
      throw std::logic_error("row constraint violated");
  }
  for (auto c : per_node)
    if (c != 1) throw std::invalid_argument("selection is not an exact cover");

  double total = 0.0;
  for (std::size_t j = 0; j < num_nodes; ++j) {
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!w[i]) continue;
      const auto& c = pool.candidates[i];
      const bool in = (c.mask >> j) & 1U;
      const double q = in ? static_cast<double>(c.cc.size()) : 0.0;
      total += size_penalty(c.size(), delta, s) - q / static_cast<double>(c.size());
    }
  }
  return total;
}

// -- Set-packing reduction ---------------------------------------------------

struct SetPackingInstance {
  struct Set {
    std::vector<std::uint32_t> elements;  // sorted, unique
    std::uint32_t weight = 1;
  };
  std::vector<Set> sets;

  std::vector<std::uint32_t> ground() const {
    std::vector<std::uint32_t> g;
    for (const auto& s : sets) g.insert(g.end(), s.elements.begin(), s.elements.end());
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
  }

  /// True iff some set is contained in (or equal to) another.
  bool has_nested_sets() const {
    for (std::size_t a = 0; a < sets.size(); ++a)
      for (std::size_t b = 0; b < sets.size(); ++b)
        if (a != b && std::includes(sets[b].elements.begin(), sets[b].elements.end(), sets[a].elements.begin(),
                                    sets[a].elements.end()))
          return true;
    return false;
  }
};

/// Lines of the form `set: 1 2 3 ; weight: 4`; `#` starts a comment.
inline SetPackingInstance parse_set_packing(std::istream& in) {
  SetPackingInstance inst;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("set-packing line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto semi = line.find(';');
    if (semi == std::string::npos) fail("missing ';'");
    std::istringstream lhs(line.substr(0, semi)), rhs(line.substr(semi + 1));
    std::string tag;
    if (!(lhs >> tag) || tag != "set:") fail("expected 'set:'");
    SetPackingInstance::Set s;
    long long e;
    while (lhs >> e) {
      if (e < 0 || e > std::numeric_limits<std::uint32_t>::max()) fail("element out of range");
      s.elements.push_back(static_cast<std::uint32_t>(e));
    }
    if (!lhs.eof()) fail("non-integer element");
    if (s.elements.empty()) fail("empty set");
    long long w;
    if (!(rhs >> tag) || tag != "weight:" || !(rhs >> w)) fail("expected 'weight: <int>'");
    std::string rest;
    if (rhs >> rest) fail("trailing text after weight");
    if (w < 1) fail("weights must be positive integers");
    s.weight = static_cast<std::uint32_t>(w);
    std::sort(s.elements.begin(), s.elements.end());
    s.elements.erase(std::unique(s.elements.begin(), s.elements.end()), s.elements.end());
    inst.sets.push_back(std::move(s));
  }
  return inst;
}

inline void write_set_packing(std::ostream& out, const SetPackingInstance& inst) {
  for (const auto& s : inst.sets) {
    out << "set:";
    for (auto e : s.elements) out << ' ' << e;
    out << " ; weight: " << s.weight << '\n';
  }
}

struct ReducedInstance {
  Topology topology;
  CandidatePool pool;                   // exactly the images of the sets
  std::vector<std::uint32_t> element_of;  // node id -> ground element
  std::map<std::uint32_t, NodeId> node_of;
};

/**
 * One CR node per ground element; each set becomes a clique whose members all
 * receive a fresh block of weight-many channels. Without nested sets the
 * image of S has exactly w(S) common channels. Pool scores are the weights.
 */
inline ReducedInstance reduce_set_packing(const SetPackingInstance& inst) {
  if (inst.has_nested_sets()) throw std::invalid_argument("set-packing instance contains nested or duplicate sets");
  std::size_t total = 0;
  for (const auto& s : inst.sets) {
    if (s.weight < 1) throw std::invalid_argument("weights must be positive");
    total += s.weight;
  }
  if (total > kMaxChannels)
    throw std::invalid_argument("reduction needs " + std::to_string(total) + " channels; capacity is " +
                                std::to_string(kMaxChannels));
  ReducedInstance r;
  r.element_of = inst.ground();
  for (NodeId i = 0; i < r.element_of.size(); ++i) r.node_of[r.element_of[i]] = i;

  std::vector<ChannelSet> channels(r.element_of.size());
  std::vector<ChannelSet> blocks;
  Channel next = 0;
  for (const auto& s : inst.sets) {
    ChannelSet block;
    for (std::uint32_t k = 0; k < s.weight; ++k) block.insert(next++);
    for (auto e : s.elements) channels[r.node_of[e]] |= block;
    blocks.push_back(block);
  }
  r.topology = Topology(std::max<std::size_t>(total, 1));
  for (const auto& c : channels) r.topology.add_node(c);
  for (const auto& s : inst.sets)
    for (std::size_t a = 0; a < s.elements.size(); ++a)
      for (std::size_t b = a + 1; b < s.elements.size(); ++b)
        r.topology.add_edge(r.node_of[s.elements[a]], r.node_of[s.elements[b]]);

  r.pool.window = SizeWindow{1, r.element_of.size()};
  for (const auto& s : inst.sets) {
    std::vector<NodeId> members;
    for (auto e : s.elements) members.push_back(r.node_of[e]);
    std::sort(members.begin(), members.end());
    Candidate c{members.front(), members, mask_of(members), cluster_cc(members, r.topology), 0.0};
    c.score = static_cast<double>(c.cc.size());
    r.pool.candidates.push_back(std::move(c));
  }
  return r;
}

/// Adds every missing singleton with score zero, so the pool always admits a
/// cover and uncovered elements contribute nothing.
inline CandidatePool with_zero_weight_singletons(CandidatePool pool, const Topology& topo) {
  std::unordered_set<NodeMask> seen;
  for (const auto& c : pool.candidates) seen.insert(c.mask);
  for (NodeId i = 0; i < topo.size(); ++i) {
    const NodeMask m = NodeMask{1} << i;
    if (seen.count(m)) continue;
    pool.candidates.push_back(Candidate{i, {i}, m, topo.channels(i), 0.0});
  }
  return pool;
}

}  // namespace crn
