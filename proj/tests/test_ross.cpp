#include <gtest/gtest.h>

#include "crn/config.hpp"
#include "crn/fixture.hpp"
#include "crn/ross.hpp"
#include "crn/scenario.hpp"

using namespace crn;
namespace f = crn::example_net;

namespace {

Topology generated(std::uint64_t seed, ScenarioConfig c = small_network_preset()) {
  c.seed = seed;
  return generate(c).topology;
}

// Channel sets only; cluster-control routines never look at links.
Topology channels_only(std::initializer_list<ChannelSet> sets) {
  Topology t(16);
  for (const auto& k : sets) t.add_node(k);
  return t;
}

}  // namespace

TEST(Election, Precedence) {
  EXPECT_TRUE(precedes({3, 1, 9}, {4, 5, 0}));
  EXPECT_TRUE(precedes({3, 2, 9}, {3, 1, 0}));
  EXPECT_TRUE(precedes({3, 2, 3}, {3, 2, 5}));
  EXPECT_FALSE(precedes({3, 2, 5}, {3, 2, 5}));
}

TEST(Election, StepCases) {
  EXPECT_EQ(head_election_step({7, 1, 4}, {}), Election::Head);
  const std::vector<ElectionKey> five{{2, 1, 5}};
  EXPECT_EQ(head_election_step({2, 1, 3}, five), Election::Head);
  const std::vector<ElectionKey> three{{2, 1, 3}};
  EXPECT_EQ(head_election_step({2, 1, 5}, three), Election::NotHead);
}

TEST(Election, FixtureHWinsOverB) {
  const auto t = f::topology();
  const auto st = init_phase1(t);
  EXPECT_EQ(st.connectivity[f::B].d, st.connectivity[f::H].d);
  EXPECT_TRUE(precedes(st.key(f::H), st.key(f::B)));
  EXPECT_EQ(st.sentinel, t.num_channels() * t.size() + 1);
}

TEST(Phase1, FixtureClusterOfH) {
  const auto p1 = form_clusters(f::topology());
  const auto* ch = p1.clusters.find_by_head(f::H);
  ASSERT_NE(ch, nullptr);
  EXPECT_EQ(ch->members, (std::vector<NodeId>{f::A, f::B, f::G, f::H}));
  EXPECT_EQ(ch->cc, ChannelSet({1, 2}));
  EXPECT_EQ(p1.debatable(), (std::vector<NodeId>{f::A, f::B, f::D}));
}

TEST(Phase1, CliqueWithUniqueMinimumDegreeFormsOneCluster) {
  Topology t(3);
  t.add_node(ChannelSet{0});
  for (int k = 0; k < 4; ++k) t.add_node(ChannelSet{0, 1, 2});
  for (NodeId a = 0; a < 5; ++a)
    for (NodeId b = a + 1; b < 5; ++b) t.add_edge(a, b);
  const auto p1 = form_clusters(t);
  ASSERT_EQ(p1.clusters.size(), 1u);
  EXPECT_EQ(p1.clusters.clusters[0].head, 0u);
  EXPECT_EQ(p1.clusters.clusters[0].size(), 5u);
}

TEST(Phase1, IsolatedNodeHeadsItself) {
  Topology t(4);
  t.add_node(ChannelSet{1});
  const auto p1 = form_clusters(t);
  ASSERT_EQ(p1.clusters.size(), 1u);
  EXPECT_EQ(p1.clusters.clusters[0].members, std::vector<NodeId>{0});
}

TEST(Phase1, DecisionsPerPassBoundedByN) {
  ScenarioConfig c;
  c.n_cr = 50;
  c.cr_range = 0.25;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto t = generated(seed, c);
    const auto first = run_phase1(t);
    ASSERT_EQ(first.pass_steps.size(), 1u);
    EXPECT_LE(first.step_counter, t.size());
    const auto full = form_clusters(t, {SizeThreshold::from(1.3, 3)});
    for (auto s : full.pass_steps) EXPECT_LE(s, t.size()) << "seed " << seed;
  }
}

TEST(Phase1, EveryNodeCoveredAndCcNonEmpty) {
  ScenarioConfig c;
  c.n_cr = 30;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto t = generated(seed, c);
    for (const auto& opts : {Phase1Options{}, Phase1Options{SizeThreshold::from(1.3, 3)}}) {
      const auto p1 = form_clusters(t, opts);
      const auto rep = validate_clustering(p1.clusters, t, false);
      EXPECT_TRUE(rep.ok()) << "seed " << seed << "\n" << rep.summary();
      for (const auto& cl : p1.clusters.clusters) {
        if (cl.size() > 1) EXPECT_FALSE(cl.cc.empty());
        if (opts.size_control) EXPECT_LE(cl.size(), 3u);
      }
      for (auto r : p1.role) EXPECT_NE(r, Role::Undecided);
    }
  }
}

TEST(Phase1, HeadsAnnounceTheirClusters) {
  const auto t = generated(3);
  const auto p1 = form_clusters(t);
  EXPECT_GE(p1.messages.head_broadcasts, p1.clusters.size());
  EXPECT_EQ(p1.heads().size(), p1.clusters.size());
}

TEST(GuaranteeCc, AlreadyNonEmptyIsUnchanged) {
  const auto t = channels_only({ChannelSet{1, 2}, ChannelSet{2}, ChannelSet{2, 3}});
  const auto r = guarantee_cc(Cluster::make(0, {1, 2}, t), t);
  EXPECT_TRUE(r.evicted.empty());
  EXPECT_EQ(r.cluster.size(), 3u);
}

TEST(GuaranteeCc, EvictsFewestSharedWithHead) {
  const auto t = channels_only({ChannelSet{1}, ChannelSet{2}, ChannelSet{1, 3}});
  const auto r = guarantee_cc(Cluster::make(0, {1, 2}, t), t);
  EXPECT_EQ(r.evicted, std::vector<NodeId>{1});
  EXPECT_EQ(r.cluster.members, (std::vector<NodeId>{0, 2}));
  EXPECT_EQ(r.cluster.cc, ChannelSet({1}));
}

TEST(GuaranteeCc, DisjointMembersLeaveSingleton) {
  const auto t = channels_only({ChannelSet{1}, ChannelSet{2}, ChannelSet{3}, ChannelSet{4}});
  const auto r = guarantee_cc(Cluster::make(0, {1, 2, 3}, t), t);
  EXPECT_EQ(r.evicted.size(), 3u);
  EXPECT_EQ(r.cluster.members, std::vector<NodeId>{0});
  EXPECT_EQ(r.cluster.cc, ChannelSet({1}));
}

TEST(Eviction, GainBreaksSharedChannelTie) {
  // Every member shares two channels with the head; only dropping 2 gives
  // the cluster back a channel.
  const auto t = channels_only({ChannelSet{1, 2, 3}, ChannelSet{1, 2, 5}, ChannelSet{1, 3, 6}, ChannelSet{1, 2, 4}});
  const auto r = prune_to_size(Cluster::make(0, {1, 2, 3}, t), SizeThreshold::from(1.3, 2), t);
  ASSERT_EQ(r.evicted.size(), 2u);
  EXPECT_EQ(r.evicted[0], 2u);
  EXPECT_EQ(r.cluster.members, (std::vector<NodeId>{0, 3}));
}

TEST(Eviction, IdBreaksRemainingTie) {
  const auto t = channels_only({ChannelSet{1, 2, 3}, ChannelSet{1, 2}, ChannelSet{1, 3}, ChannelSet{1, 2, 3, 4}});
  const auto r = prune_to_size(Cluster::make(0, {1, 2, 3}, t), SizeThreshold::from(1.3, 2), t);
  EXPECT_EQ(r.evicted, (std::vector<NodeId>{1, 2}));
}

TEST(SizeControl, ThresholdArithmetic) {
  const auto t43 = SizeThreshold::from(1.3, 4);
  EXPECT_FALSE(t43.exceeded_by(5));
  EXPECT_TRUE(t43.exceeded_by(6));
  EXPECT_EQ(t43.limit(), 5u);
  EXPECT_EQ(SizeThreshold::from(1.3, 3).limit(), 3u);
  EXPECT_EQ(SizeThreshold::from(1.3, 10).limit(), 13u);
  EXPECT_EQ(SizeThreshold::from(1.5, 2).limit(), 3u);
}

TEST(SizeControl, PruneCases) {
  std::vector<ChannelSet> sets(8, ChannelSet{1, 2});
  Topology t(4);
  for (const auto& k : sets) t.add_node(k);
  const auto five = prune_to_size(Cluster::make(0, {1, 2, 3, 4}, t), 1.3, 4, t);
  EXPECT_TRUE(five.evicted.empty());
  const auto eight = prune_to_size(Cluster::make(0, {1, 2, 3, 4, 5, 6, 7}, t), 1.3, 3, t);
  EXPECT_EQ(eight.evicted.size(), 5u);
  EXPECT_EQ(eight.cluster.size(), 3u);
  EXPECT_TRUE(eight.cluster.contains(0));
  EXPECT_THROW(prune_to_size(Cluster::make(0, {1}, t), SizeThreshold{1, 2, 1}, t), std::invalid_argument);
}

TEST(SizeControl, NoOpWhenThresholdIsLarge) {
  const auto t = generated(4);
  const auto plain = form_clusters(t);
  const auto loose = form_clusters(t, {SizeThreshold::from(1.3, t.size())});
  EXPECT_EQ(plain.clusters, loose.clusters);
}

TEST(Reintegrate, NothingEvictedIsIdentity) {
  const auto t = f::topology();
  auto st = run_phase1(t);
  const auto before = st.clusters;
  EXPECT_EQ(reintegrate({}, st, t), st.clusters.size());
  EXPECT_EQ(st.clusters, before);
}

TEST(Reintegrate, LoneEvicteeBecomesSingletonHead) {
  // Path 0-1-2 where 2 shares nothing with 1 beyond the link channel.
  Topology t(4);
  t.add_node(ChannelSet{0, 1});
  t.add_node(ChannelSet{0, 1, 2});
  t.add_node(ChannelSet{2, 3});
  t.add_edge(0, 1);
  t.add_edge(1, 2);
  const auto p1 = form_clusters(t);
  EXPECT_TRUE(validate_clustering(p1.clusters, t, false).ok());
  for (const auto& cl : p1.clusters.clusters)
    if (cl.size() > 1) EXPECT_FALSE(cl.cc.empty());
}

TEST(Saturation, EstimateFormula) {
  EXPECT_DOUBLE_EQ(estimate_max_clusters(50, 10), 25.0);
  EXPECT_DOUBLE_EQ(estimate_max_clusters(10, 10), 1.0);
  EXPECT_DOUBLE_EQ(estimate_max_clusters(100, 10), 100.0);
  EXPECT_THROW(estimate_max_clusters(1, 0), std::invalid_argument);
}
