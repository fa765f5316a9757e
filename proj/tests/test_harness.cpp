#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "crn/fixture.hpp"
#include "crn/harness.hpp"

using namespace crn;
namespace f = crn::example_net;

namespace {

Clustering sized(std::initializer_list<std::size_t> sizes, std::initializer_list<std::size_t> ccs = {}) {
  Clustering c;
  NodeId next = 0;
  auto cc = ccs.begin();
  for (auto s : sizes) {
    Cluster cl;
    cl.head = next;
    for (std::size_t k = 0; k < s; ++k) cl.members.push_back(next++);
    if (cc != ccs.end()) {
      for (std::size_t k = 0; k < *cc; ++k) cl.cc.insert(static_cast<Channel>(k));
      ++cc;
    }
    c.clusters.push_back(cl);
  }
  return c;
}

}  // namespace

TEST(Schemes, NamesRoundTrip) {
  for (auto s : kAllSchemes) EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  EXPECT_FALSE(parse_scheme("ross").has_value());
  EXPECT_TRUE(uses_size_control(Scheme::RossScDfa));
  EXPECT_FALSE(uses_dga(Scheme::RossDfa));
  EXPECT_FALSE(is_ross(Scheme::Central));
}

TEST(Metrics, AverageCcOverNonSingletons) {
  EXPECT_DOUBLE_EQ(*metric_avg_cc_nonsingleton(sized({2, 3, 1}, {2, 3, 9})), 2.5);
  EXPECT_FALSE(metric_avg_cc_nonsingleton(sized({1, 1, 1}, {4, 4, 4})).has_value());
  EXPECT_DOUBLE_EQ(*metric_avg_cc_nonsingleton(sized({2}, {4})), 4.0);
}

TEST(Metrics, SizeCdf) {
  using Cdf = std::vector<std::pair<std::size_t, double>>;
  EXPECT_EQ(size_cdf(sized({3, 3, 2})), (Cdf{{2, 0.25}, {3, 1.0}}));
  EXPECT_EQ(size_cdf(sized({7})), (Cdf{{7, 1.0}}));
  EXPECT_EQ(size_cdf(sized({1, 1, 1, 1})), (Cdf{{1, 1.0}}));
  const auto h = size_histogram(sized({3, 1, 3, 2}));
  EXPECT_EQ(h.at(3), 2u);
  EXPECT_EQ(count_singleton_nodes(sized({3, 1, 1, 2})), 2u);
}

TEST(Metrics, Ci95NormalApproximation) {
  const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
  const auto ci = ci95(xs);
  EXPECT_DOUBLE_EQ(ci.mean, 5.0);
  // Sample variance 32/7.
  EXPECT_NEAR(ci.half_width, 1.96 * std::sqrt(32.0 / 7.0) / std::sqrt(8.0), 1e-12);
  EXPECT_DOUBLE_EQ(ci95(std::vector<double>{3}).half_width, 0.0);
  EXPECT_DOUBLE_EQ(ci95(std::vector<double>{}).mean, 0.0);
}

TEST(Metrics, PooledMedian) {
  const std::vector<Clustering> cs{sized({3, 3, 2}), sized({1, 1})};
  // Node sizes: 1 1 2 2 3 3 3 3 3 3 -> median of the 5th and 6th is 3.
  EXPECT_DOUBLE_EQ(pooled_median_size(cs), 3.0);
  EXPECT_DOUBLE_EQ(pooled_median_size(std::vector<Clustering>{sized({2, 1})}), 2.0);
}

TEST(Unclustered, FrozenClustersAgainstShrunkSpectrum) {
  auto t = f::topology();
  Clustering frozen;
  frozen.clusters.push_back(Cluster::make(f::H, {f::A, f::B, f::G}, t));
  frozen.clusters.push_back(Cluster::make(f::C, {f::D}, t));
  frozen.clusters.push_back(Cluster::make(f::E, {}, t));
  EXPECT_EQ(count_unclustered(frozen, t), 1u);
  // Remove channels 1 and 2 from H: {H,A,B,G} loses its CC.
  t.set_channels(f::H, ChannelSet{5, 8});
  EXPECT_EQ(count_unclustered(frozen, t), 5u);
}

TEST(Unclustered, LinkLossKillsCluster) {
  Topology t(2);
  t.add_node(ChannelSet{0, 1}, Point{0.0, 0.0});
  t.add_node(ChannelSet{0}, Point{0.1, 0.0});
  t.derive_unit_disk_edges(0.5);
  Clustering frozen;
  frozen.clusters.push_back(Cluster::make(0, {1}, t));
  EXPECT_EQ(count_unclustered(frozen, t), 0u);
  t.set_channels(1, ChannelSet{1});
  t.derive_unit_disk_edges(0.5);
  EXPECT_EQ(count_unclustered(frozen, t), 0u);
  t.set_channels(0, ChannelSet{0});
  t.derive_unit_disk_edges(0.5);
  EXPECT_EQ(count_unclustered(frozen, t), 2u);
}

TEST(Messages, ClosedForms) {
  auto c = small_network_preset();
  c.seed = 3;
  const auto t = generate(c).topology;
  const auto soc = run_scheme(Scheme::Soc, t, c);
  const auto soc_row = message_row(3, soc, t.size());
  EXPECT_EQ(soc_row.measured, 60u);
  EXPECT_TRUE(soc_row.ok);
  const auto central = run_scheme(Scheme::Central, t, c);
  const auto central_row = message_row(3, central, t.size());
  EXPECT_EQ(central_row.measured, central.h + central.m + t.size());
  EXPECT_TRUE(central_row.ok);
  const auto dga = run_scheme(Scheme::RossDga, t, c);
  const auto dga_row = message_row(3, dga, t.size());
  EXPECT_EQ(dga_row.bound, dga.h + 2 * dga.m * dga.m * dga.d);
  EXPECT_EQ(dga_row.measured, dga.h + dga.messages.affiliation + dga.messages.composition);
  EXPECT_TRUE(dga_row.ok);
  const auto dfa = run_scheme(Scheme::RossDfa, t, c);
  EXPECT_EQ(message_row(3, dfa, t.size()).bound, dfa.h + 2 * dfa.m);
}

TEST(Messages, PlainDfaWithinBoundOnSmallNetworks) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto c = small_network_preset();
    c.seed = seed;
    const auto t = generate(c).topology;
    for (auto s : {Scheme::RossDga, Scheme::RossDfa, Scheme::RossScDga, Scheme::Soc}) {
      const auto r = message_row(seed, run_scheme(s, t, c), t.size());
      EXPECT_TRUE(r.ok) << scheme_name(s) << " seed " << seed << " " << r.measured << " > " << r.bound;
    }
  }
}

TEST(Runs, RecordInvariantsAndCsv) {
  auto c = small_network_preset();
  c.seed = 8;
  const auto state = generate(c);
  for (auto s : kAllSchemes) {
    const auto run = run_scheme(s, state.topology, c);
    EXPECT_TRUE(validate_clustering(run.clustering, state.topology, true).ok()) << scheme_name(s);
    const auto rec = make_record(8, run, c.n_cr, state.pus.size());
    std::size_t nodes = 0, clusters = 0;
    for (auto [size, n] : rec.size_histogram) {
      nodes += size * n;
      clusters += n;
    }
    EXPECT_EQ(nodes, c.n_cr);
    EXPECT_EQ(clusters, rec.num_clusters);
    EXPECT_LE(rec.num_singletons, rec.num_clusters);
    EXPECT_EQ(rec.num_unclustered, rec.num_singletons);
    std::ostringstream out;
    write_run(out, rec);
    const auto line = out.str();
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 13);
  }
  std::ostringstream hdr;
  write_runs_header(hdr);
  const auto header = hdr.str();
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 13);
}

TEST(Parallel, OrderIndependentOfThreads) {
  const auto one = parallel_map<std::size_t>(37, 1, [](std::size_t k) { return k * k; });
  const auto many = parallel_map<std::size_t>(37, 8, [](std::size_t k) { return k * k; });
  EXPECT_EQ(one, many);
  EXPECT_EQ(one[6], 36u);
  EXPECT_THROW(parallel_map<int>(4, 2, [](std::size_t k) -> int {
                 if (k == 3) throw std::runtime_error("boom");
                 return 0;
               }),
               std::runtime_error);
  const auto seeds = seed_range(5, 3);
  EXPECT_EQ(seeds, (std::vector<std::uint64_t>{5, 6, 7}));
}

TEST(Robustness, RowCountAndMonotoneMeans) {
  const std::vector<Scheme> schemes{Scheme::RossDga, Scheme::RossScDfa, Scheme::Soc};
  const auto seeds = seed_range(1, 50);
  const auto res = robustness_experiment(small_network_preset(), schemes, 19, 5, seeds, 4);
  EXPECT_EQ(res.rows.size(), 50u * 20u * schemes.size());
  ASSERT_EQ(res.curves.size(), schemes.size());
  for (const auto& curve : res.curves) {
    ASSERT_EQ(curve.points.size(), 20u);
    EXPECT_EQ(curve.points.front().num_pu, 10u);
    EXPECT_EQ(curve.points.back().num_pu, 105u);
    for (std::size_t b = 1; b < curve.points.size(); ++b)
      EXPECT_GE(curve.points[b].unclustered.mean, curve.points[b - 1].unclustered.mean) << scheme_name(curve.scheme);
  }
  // Same result whatever the worker count.
  const auto again = robustness_experiment(small_network_preset(), schemes, 19, 5, seeds, 1);
  ASSERT_EQ(again.rows.size(), res.rows.size());
  for (std::size_t k = 0; k < res.rows.size(); ++k) EXPECT_EQ(again.rows[k].unclustered, res.rows[k].unclustered);
}

TEST(Robustness, EmptyBatchesGiveFlatCurve) {
  const std::vector<Scheme> schemes{Scheme::RossDga};
  const auto res = robustness_experiment(small_network_preset(), schemes, 4, 0, seed_range(1, 5), 2);
  for (const auto& p : res.curves[0].points) EXPECT_DOUBLE_EQ(p.unclustered.mean, res.curves[0].points[0].unclustered.mean);
}

TEST(Scale, BelowSaturationAndTrend) {
  const std::vector<std::size_t> sizes{30, 60, 120};
  const auto pts = scale_experiment(large_network_preset(100), sizes, seed_range(1, 50), Scheme::RossDga, 4);
  ASSERT_EQ(pts.size(), 3u);
  for (const auto& p : pts) EXPECT_LT(p.clusters.mean, static_cast<double>(p.n));
  for (std::size_t k = 1; k < pts.size(); ++k)
    EXPECT_GE(pts[k].clusters.mean + pts[k].clusters.half_width, pts[k - 1].clusters.mean - pts[k - 1].clusters.half_width);
}

TEST(Compare, OneRunPerSchemeInOrder) {
  const std::vector<Scheme> schemes{Scheme::Soc, Scheme::RossDga};
  const auto res = compare_experiment(small_network_preset(), schemes, seed_range(3, 4), 2);
  ASSERT_EQ(res.size(), 4u);
  EXPECT_EQ(res[0].seed, 3u);
  for (const auto& sr : res) {
    ASSERT_EQ(sr.runs.size(), 2u);
    EXPECT_EQ(sr.runs[0].scheme, Scheme::Soc);
    EXPECT_EQ(sr.num_pu, 10u);
  }
}
