#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "crn/centralized.hpp"
#include "crn/cluster.hpp"
#include "crn/config.hpp"
#include "crn/membership.hpp"
#include "crn/ross.hpp"
#include "crn/scenario.hpp"
#include "crn/soc.hpp"
#include "crn/topology.hpp"

namespace crn {

enum class Scheme { RossDga, RossDfa, RossScDga, RossScDfa, Soc, Central };

inline constexpr std::array<Scheme, 6> kAllSchemes = {Scheme::RossDga,   Scheme::RossDfa, Scheme::RossScDga,
                                                      Scheme::RossScDfa, Scheme::Soc,     Scheme::Central};

inline std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::RossDga: return "ross-dga";
    case Scheme::RossDfa: return "ross-dfa";
    case Scheme::RossScDga: return "ross-sc-dga";
    case Scheme::RossScDfa: return "ross-sc-dfa";
    case Scheme::Soc: return "soc";
    case Scheme::Central: return "central";
  }
  return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
  for (auto s : kAllSchemes)
    if (scheme_name(s) == name) return s;
  return std::nullopt;
}

inline bool is_ross(Scheme s) { return s != Scheme::Soc && s != Scheme::Central; }
inline bool uses_size_control(Scheme s) { return s == Scheme::RossScDga || s == Scheme::RossScDfa; }
inline bool uses_dga(Scheme s) { return s == Scheme::RossDga || s == Scheme::RossScDga; }

// -- One scheme on one topology ---------------------------------------------

struct SchemeRun {
  Scheme scheme = Scheme::RossDga;
  Clustering clustering;
  MessageCounter messages;
  // Phase-I shape: heads, debatable nodes, and the largest number of
  // claiming clusters of any debatable node. The centralized scheme takes
  // these from the ROSS backbone it would disseminate over.
  std::size_t h = 0, m = 0, d = 0;
  std::vector<std::size_t> pass_steps;  // election decisions per phase-I pass
  std::size_t best_responses = 0;       // DGA affiliation changes
  std::size_t response_bound = 0;       // n^2 * m for the DGA game
  std::vector<Cluster> phase1_clusters;
};

namespace detail {

inline void record_phase1(SchemeRun& r, const Phase1State& p1) {
  r.h = p1.clusters.size();
  const auto aff = p1.clusters.affiliations(p1.size());
  r.m = 0;
  r.d = 0;
  for (const auto& a : aff)
    if (a.size() > 1) {
      ++r.m;
      r.d = std::max(r.d, a.size());
    }
  r.pass_steps = p1.pass_steps;
  r.phase1_clusters = p1.clusters.clusters;
}

}  // namespace detail

inline Phase1Options phase1_options(Scheme s, const ScenarioConfig& c) {
  Phase1Options o;
  if (uses_size_control(s)) o.size_control = SizeThreshold::from(c.t_factor, c.delta);
  return o;
}

inline ScoreParams score_params(const ScenarioConfig& c, std::size_t n) {
  return ScoreParams{n, c.delta, PenaltySchedule{c.rho1, c.rho2}, c.penalty_scale};
}

inline SchemeRun run_scheme(Scheme s, const Topology& topo, const ScenarioConfig& c) {
  SchemeRun r;
  r.scheme = s;
  if (is_ross(s)) {
    const auto p1 = form_clusters(topo, phase1_options(s, c));
    detail::record_phase1(r, p1);
    auto res = uses_dga(s) ? run_dga(p1.clusters, topo) : run_dfa(p1.clusters, topo);
    r.clustering = std::move(res.clustering);
    r.messages = p1.messages;
    r.messages += res.game.messages;
    r.best_responses = res.game.response_log.size();
    r.response_bound = res.game.step_bound();
  } else if (s == Scheme::Soc) {
    auto st = run_soc_detailed(topo, c.soc_rule);
    r.clustering = st.clustering(topo);
    r.messages = st.messages;
  } else {
    const PenaltySchedule sched{c.rho1, c.rho2};
    sched.validate();
    r.clustering = solve_topology(topo, default_window(c.delta), score_params(c, topo.size())).clustering;
    // Gathering: every node reports once (N); dissemination: every backbone
    // head and gateway broadcasts once (h + m).
    const auto backbone = form_clusters(topo);
    detail::record_phase1(r, backbone);
    r.messages.member_updates = topo.size();
    r.messages.head_broadcasts = r.h;
    r.messages.affiliation = r.m;
  }
  return r;
}

// -- Metrics -----------------------------------------------------------------

/// Mean |K(C)| over clusters with at least two members; empty if none.
inline std::optional<double> metric_avg_cc_nonsingleton(const Clustering& c) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& cl : c.clusters)
    if (cl.size() >= 2) {
      sum += static_cast<double>(cl.cc.size());
      ++n;
    }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

/// (size, fraction of nodes in clusters of at most that size), one entry per
/// size that occurs.
inline std::vector<std::pair<std::size_t, double>> size_cdf(const Clustering& c) {
  std::map<std::size_t, std::size_t> nodes_at;
  std::size_t total = 0;
  for (const auto& cl : c.clusters) {
    nodes_at[cl.size()] += cl.size();
    total += cl.size();
  }
  std::vector<std::pair<std::size_t, double>> out;
  std::size_t acc = 0;
  for (auto [size, n] : nodes_at) {
    acc += n;
    out.emplace_back(size, acc == total ? 1.0 : static_cast<double>(acc) / static_cast<double>(total));
  }
  return out;
}

inline std::map<std::size_t, std::size_t> size_histogram(const Clustering& c) {
  std::map<std::size_t, std::size_t> h;
  for (const auto& cl : c.clusters) ++h[cl.size()];
  return h;
}

/// Nodes in singleton clusters.
inline std::size_t count_singleton_nodes(const Clustering& c) {
  return static_cast<std::size_t>(
      std::count_if(c.clusters.begin(), c.clusters.end(), [](const Cluster& cl) { return cl.size() == 1; }));
}

/// Nodes counted as unclustered once `frozen` is judged against the current
/// spectrum: members of singleton clusters, and of clusters that lost every
/// common channel or whose head lost a link to a member.
inline std::size_t count_unclustered(const Clustering& frozen, const Topology& now) {
  std::size_t n = 0;
  for (const auto& cl : frozen.clusters) {
    if (cl.size() == 1) {
      ++n;
      continue;
    }
    bool alive = !cluster_cc(cl.members, now).empty();
    for (auto m : cl.members)
      if (alive && m != cl.head && !now.adjacent(m, cl.head)) alive = false;
    if (!alive) n += cl.size();
  }
  return n;
}

struct Interval {
  double mean = 0.0;
  double half_width = 0.0;  // 95%, normal approximation

  double lo() const { return mean - half_width; }
  double hi() const { return mean + half_width; }
};

inline Interval ci95(std::span<const double> xs) {
  Interval r;
  if (xs.empty()) return r;
  double sum = 0.0;
  for (auto x : xs) sum += x;
  r.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return r;
  double ss = 0.0;
  for (auto x : xs) ss += (x - r.mean) * (x - r.mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  r.half_width = 1.96 * sd / std::sqrt(static_cast<double>(xs.size()));
  return r;
}

// -- Run records ---------------------------------------------------------------

struct RunRecord {
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::RossDga;
  std::size_t n = 0;
  std::size_t num_pu = 0;
  std::optional<double> avg_cc_nonsingleton;
  std::size_t num_clusters = 0;
  std::size_t num_singletons = 0;
  std::size_t num_unclustered = 0;
  std::map<std::size_t, std::size_t> size_histogram;
  MessageCounter messages;
};

inline RunRecord make_record(std::uint64_t seed, const SchemeRun& run, std::size_t n, std::size_t num_pu) {
  RunRecord r;
  r.seed = seed;
  r.scheme = run.scheme;
  r.n = n;
  r.num_pu = num_pu;
  r.avg_cc_nonsingleton = metric_avg_cc_nonsingleton(run.clustering);
  r.num_clusters = run.clustering.size();
  r.num_singletons = count_singleton_nodes(run.clustering);
  r.num_unclustered = r.num_singletons;
  r.size_histogram = size_histogram(run.clustering);
  r.messages = run.messages;
  return r;
}

inline void write_runs_header(std::ostream& out) {
  out << "seed,scheme,N,num_pu,avg_cc_nonsingleton,num_clusters,num_singletons,num_unclustered,size_histogram,"
         "head_broadcasts,member_updates,affiliation_msgs,composition_msgs,total\n";
}

/// size_histogram is `size:count` pairs joined by ';'. A missing average
/// (no non-singleton cluster) is an empty field.
inline void write_run(std::ostream& out, const RunRecord& r) {
  out << r.seed << ',' << scheme_name(r.scheme) << ',' << r.n << ',' << r.num_pu << ',';
  if (r.avg_cc_nonsingleton) out << *r.avg_cc_nonsingleton;
  out << ',' << r.num_clusters << ',' << r.num_singletons << ',' << r.num_unclustered << ',';
  bool first = true;
  for (auto [s, c] : r.size_histogram) {
    out << (first ? "" : ";") << s << ':' << c;
    first = false;
  }
  const auto& m = r.messages;
  out << ',' << m.head_broadcasts << ',' << m.member_updates << ',' << m.affiliation << ',' << m.composition << ','
      << m.total() << '\n';
}

// -- Message accounting ---------------------------------------------------------

struct MessageRow {
  Scheme scheme = Scheme::RossDga;
  std::uint64_t seed = 0;
  std::size_t h = 0, m = 0, d = 0;
  std::size_t measured = 0;
  std::size_t bound = 0;
  bool ok = true;
};

/**
 * Compares a run's counted broadcasts with the closed form for its scheme.
 * ROSS counts head broadcasts plus phase-II messages; the members' one-byte
 * degree updates are outside the table's count. SOC must match 3N exactly and
 * the centralized model must equal h + m + N.
 */
inline MessageRow message_row(std::uint64_t seed, const SchemeRun& run, std::size_t n) {
  MessageRow r{run.scheme, seed, run.h, run.m, run.d, 0, 0, true};
  const auto& c = run.messages;
  switch (run.scheme) {
    case Scheme::RossDga:
    case Scheme::RossScDga:
      r.measured = run.h + c.affiliation + c.composition;
      r.bound = run.h + 2 * run.m * run.m * run.d;
      r.ok = r.measured <= r.bound;
      break;
    case Scheme::RossDfa:
    case Scheme::RossScDfa:
      r.measured = run.h + c.affiliation + c.composition;
      r.bound = run.h + 2 * run.m;
      r.ok = r.measured <= r.bound;
      break;
    case Scheme::Soc:
      r.measured = c.total();
      r.bound = 3 * n;
      r.ok = r.measured == r.bound;
      break;
    case Scheme::Central:
      r.measured = c.total();
      r.bound = run.h + run.m + n;
      r.ok = r.measured == r.bound;
      break;
  }
  return r;
}

inline std::vector<MessageRow> message_report(std::span<const std::pair<std::uint64_t, SchemeRun>> runs,
                                              std::size_t n) {
  std::vector<MessageRow> out;
  for (const auto& [seed, run] : runs) out.push_back(message_row(seed, run, n));
  return out;
}

inline void write_messages_header(std::ostream& out) { out << "scheme,seed,h,m,d,measured,bound\n"; }

inline void write_message_row(std::ostream& out, const MessageRow& r) {
  out << scheme_name(r.scheme) << ',' << r.seed << ',' << r.h << ',' << r.m << ',' << r.d << ',' << r.measured
      << ',' << r.bound << '\n';
}

inline void write_sizes_header(std::ostream& out) { out << "scheme,seed,size,node_fraction\n"; }

/// node_fraction is cumulative, as returned by size_cdf.
inline void write_sizes(std::ostream& out, Scheme s, std::uint64_t seed, const Clustering& c) {
  for (auto [size, frac] : size_cdf(c)) out << scheme_name(s) << ',' << seed << ',' << size << ',' << frac << '\n';
}

// -- Parallel seeds -------------------------------------------------------------

/// Runs `work(k)` for k in [0, count) on up to `threads` workers. Results are
/// stored by index, so output order never depends on scheduling.
template <class Result>
std::vector<Result> parallel_map(std::size_t count, unsigned threads, const std::function<Result(std::size_t)>& work) {
  std::vector<Result> out(count);
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < count; k += threads) out[k] = work(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// -- Experiments ----------------------------------------------------------------

inline std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> s(count);
  for (std::size_t k = 0; k < count; ++k) s[k] = first + k;
  return s;
}

struct RobustnessRow {
  Scheme scheme = Scheme::RossDga;
  std::uint64_t seed = 0;
  std::size_t batch = 0;
  std::size_t num_pu = 0;
  std::size_t unclustered = 0;
};

struct RobustnessPoint {
  std::size_t batch = 0;
  std::size_t num_pu = 0;
  Interval unclustered;
};

struct RobustnessCurve {
  Scheme scheme = Scheme::RossDga;
  std::vector<RobustnessPoint> points;  // index = batch; batch 0 is the initial PU level
};

struct RobustnessResult {
  std::vector<RobustnessRow> rows;  // seed-major, then batch, then scheme order
  std::vector<RobustnessCurve> curves;
};

/**
 * Clusters are formed once per seed on the initial scenario and then frozen;
 * each batch adds PUs to the same scenario and re-judges the frozen clusters.
 */
inline RobustnessResult robustness_experiment(const ScenarioConfig& config, std::span<const Scheme> schemes,
                                              std::size_t batches, std::size_t batch_size,
                                              std::span<const std::uint64_t> seeds, unsigned threads = 0) {
  const auto per_seed = parallel_map<std::vector<RobustnessRow>>(seeds.size(), threads, [&](std::size_t k) {
    auto cfg = config;
    cfg.seed = seeds[k];
    auto state = generate(cfg);
    std::vector<Clustering> frozen;
    for (auto s : schemes) frozen.push_back(run_scheme(s, state.topology, cfg).clustering);
    std::vector<RobustnessRow> rows;
    for (std::size_t b = 0; b <= batches; ++b) {
      if (b > 0) state = add_pu_batch(std::move(state), batch_size);
      for (std::size_t i = 0; i < schemes.size(); ++i)
        rows.push_back({schemes[i], seeds[k], b, state.pus.size(), count_unclustered(frozen[i], state.topology)});
    }
    return rows;
  });
  RobustnessResult res;
  for (const auto& rows : per_seed) res.rows.insert(res.rows.end(), rows.begin(), rows.end());
  for (auto s : schemes) {
    RobustnessCurve curve{s, {}};
    for (std::size_t b = 0; b <= batches; ++b) {
      std::vector<double> xs;
      std::size_t num_pu = 0;
      for (const auto& r : res.rows)
        if (r.scheme == s && r.batch == b) {
          xs.push_back(static_cast<double>(r.unclustered));
          num_pu = r.num_pu;
        }
      curve.points.push_back({b, num_pu, ci95(xs)});
    }
    res.curves.push_back(std::move(curve));
  }
  return res;
}

inline void write_robustness_header(std::ostream& out) { out << "scheme,seed,batch,num_pu,unclustered\n"; }

inline void write_robustness_row(std::ostream& out, const RobustnessRow& r) {
  out << scheme_name(r.scheme) << ',' << r.seed << ',' << r.batch << ',' << r.num_pu << ',' << r.unclustered << '\n';
}

struct SeedRuns {
  std::uint64_t seed = 0;
  std::size_t num_pu = 0;
  std::vector<SchemeRun> runs;  // same order as the requested schemes
};

/// Every requested scheme on each seed's scenario.
inline std::vector<SeedRuns> compare_experiment(const ScenarioConfig& config, std::span<const Scheme> schemes,
                                                std::span<const std::uint64_t> seeds, unsigned threads = 0) {
  return parallel_map<SeedRuns>(seeds.size(), threads, [&](std::size_t k) {
    auto cfg = config;
    cfg.seed = seeds[k];
    const auto state = generate(cfg);
    SeedRuns out{seeds[k], state.pus.size(), {}};
    for (auto s : schemes) out.runs.push_back(run_scheme(s, state.topology, cfg));
    return out;
  });
}

struct ScalePoint {
  std::size_t n = 0;
  Interval clusters;
  std::vector<std::size_t> counts;  // per seed
};

/// Mean cluster count of `scheme` for each network size, other parameters
/// fixed by `tmpl`.
inline std::vector<ScalePoint> scale_experiment(const ScenarioConfig& tmpl, std::span<const std::size_t> sizes,
                                                std::span<const std::uint64_t> seeds,
                                                Scheme scheme = Scheme::RossDga, unsigned threads = 0) {
  std::vector<ScalePoint> out;
  for (auto n : sizes) {
    auto cfg = tmpl;
    cfg.n_cr = n;
    const auto counts = parallel_map<std::size_t>(seeds.size(), threads, [&](std::size_t k) {
      auto c = cfg;
      c.seed = seeds[k];
      return run_scheme(scheme, generate(c).topology, c).clustering.size();
    });
    std::vector<double> xs(counts.begin(), counts.end());
    out.push_back({n, ci95(xs), counts});
  }
  return out;
}

/// Node-weighted median cluster size over several clusterings.
inline double pooled_median_size(std::span<const Clustering> cs) {
  std::vector<std::size_t> sizes;
  for (const auto& c : cs)
    for (const auto& cl : c.clusters) sizes.insert(sizes.end(), cl.size(), cl.size());
  if (sizes.empty()) return 0.0;
  std::sort(sizes.begin(), sizes.end());
  const auto n = sizes.size();
  return n % 2 ? static_cast<double>(sizes[n / 2])
               : 0.5 * static_cast<double>(sizes[n / 2 - 1] + sizes[n / 2]);
}

}  // namespace crn
