#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "crn/config.hpp"
#include "crn/rng.hpp"
#include "crn/scenario.hpp"

using namespace crn;

TEST(Rng, SplitMixReferenceSequence) {
  std::uint64_t x = 1234567;
  EXPECT_EQ(Rng::splitmix64(x), 6457827717110365317ULL);
  EXPECT_EQ(Rng::splitmix64(x), 3203168211198807973ULL);
  EXPECT_EQ(Rng::splitmix64(x), 9817491932198370423ULL);
}

// Values from an independent script implementation of xoshiro256** seeded by
// four splitmix64 draws.
TEST(Rng, XoshiroOutputsForSeed42) {
  Rng r(42);
  EXPECT_EQ(r.next(), 1546998764402558742ULL);
  EXPECT_EQ(r.next(), 6990951692964543102ULL);
  EXPECT_EQ(r.next(), 12544586762248559009ULL);
  EXPECT_EQ(r.next(), 17057574109182124193ULL);
}

TEST(Rng, DerivedDrawsStayInRange) {
  Rng r(3);
  std::vector<int> hist(7, 0);
  for (int k = 0; k < 70000; ++k) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++hist[v];
    const double u = r.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
  EXPECT_EQ(r.below(1), 0u);
  Rng a(9), b(9);
  for (int k = 0; k < 100; ++k) ASSERT_EQ(a.next(), b.next());
}

TEST(Config, ParseOverridesAndComments) {
  std::istringstream in(
      "# setup\n"
      "n_cr = 30\n"
      "  delta=4   # trailing comment\n"
      "pu_channel_model = single_channel\n"
      "delta2 = N\n"
      "penalty_scale = |C|\n"
      "soc_rule = welfare\n");
  const auto c = parse_config(in);
  EXPECT_EQ(c.n_cr, 30u);
  EXPECT_EQ(c.delta, 4u);
  EXPECT_EQ(c.pu_channel_model, PuChannelModel::SingleChannel);
  EXPECT_FALSE(c.delta2.has_value());
  EXPECT_EQ(c.effective_delta2(), 30u);
  EXPECT_EQ(c.penalty_scale, PenaltyScale::ClusterSize);
  EXPECT_EQ(c.soc_rule, SocAcceptance::Welfare);
  EXPECT_EQ(c.n_pu, ScenarioConfig{}.n_pu);
}

TEST(Config, RejectsBadInput) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return parse_config(in);
  };
  EXPECT_THROW(parse("bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse("n_cr 20\n"), ConfigError);
  EXPECT_THROW(parse("n_cr = -3\n"), ConfigError);
  EXPECT_THROW(parse("cr_range = abc\n"), ConfigError);
  EXPECT_THROW(parse("pu_channel_model = sometimes\n"), ConfigError);
  ScenarioConfig c;
  c.t_factor = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.delta = 40;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.rho1 = 0.7;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, TextRoundTrip) {
  auto c = large_network_preset(200);
  c.delta2 = 50;
  c.seed = 99;
  c.soc_rule = SocAcceptance::OwnCluster;
  std::istringstream in(to_config_text(c));
  const auto back = parse_config(in);
  EXPECT_EQ(to_config_text(back), to_config_text(c));
  EXPECT_EQ(back.cr_range, c.cr_range);
  EXPECT_EQ(back.delta, 12u);
  EXPECT_EQ(back.delta2, std::optional<std::size_t>(50));
}

TEST(Config, PresetDesiredSizes) {
  EXPECT_EQ(large_network_preset(100).delta, 6u);
  EXPECT_EQ(large_network_preset(200).delta, 12u);
  EXPECT_EQ(large_network_preset(300).delta, 20u);
  EXPECT_EQ(large_network_preset(50).delta, 3u);
  const auto s = small_network_preset();
  EXPECT_EQ(s.n_cr, 20u);
  EXPECT_EQ(s.n_pu, 10u);
  EXPECT_DOUBLE_EQ(s.cr_range, 1.0 / 3.0);
}

TEST(Availability, RuleCases) {
  const std::vector<Point> nodes{{0.9, 0.9}, {0.1, 0.1}};
  std::vector<PrimaryUser> pus{{{0.1, 0.15}, 0.2, ChannelSet{1, 2}}};
  auto k = derive_availability(nodes, pus, 10);
  EXPECT_EQ(k[0], ChannelSet::full(10));
  EXPECT_EQ(k[1], ChannelSet::full(10) - ChannelSet({1, 2}));

  pus = {{{0.1, 0.15}, 0.2, ChannelSet{1}}, {{0.12, 0.1}, 0.2, ChannelSet{2, 3}}};
  k = derive_availability(nodes, pus, 10);
  EXPECT_EQ(k[1], ChannelSet::full(10) - ChannelSet({1, 2, 3}));

  // Strictly inside: a node exactly on the boundary keeps its channels.
  pus = {{{0.1, 0.3}, 0.2, ChannelSet{4}}};
  k = derive_availability(std::vector<Point>{{0.1, 0.5}}, pus, 10);
  EXPECT_TRUE(k[0].contains(4));
}

TEST(Generate, DeterministicPerSeed) {
  auto c = small_network_preset();
  c.seed = 17;
  const auto a = generate(c), b = generate(c);
  EXPECT_EQ(a.pus, b.pus);
  EXPECT_EQ(a.topology.edges(), b.topology.edges());
  for (NodeId i = 0; i < a.topology.size(); ++i) {
    EXPECT_EQ(a.topology.channels(i), b.topology.channels(i));
    EXPECT_EQ(a.topology.nodes()[i].pos->x, b.topology.nodes()[i].pos->x);
  }
  c.seed = 18;
  EXPECT_NE(generate(c).pus, a.pus);
}

TEST(Generate, NoPuActivityLeavesAllChannels) {
  ScenarioConfig c;
  c.pu_active_prob = 0.0;
  const auto s = generate(c);
  for (const auto& n : s.topology.nodes()) EXPECT_EQ(n.channels, ChannelSet::full(10));
}

TEST(Generate, EdgesFollowRangeAndSharedChannel) {
  auto c = small_network_preset();
  c.seed = 5;
  const auto s = generate(c);
  const auto& t = s.topology;
  for (NodeId i = 0; i < t.size(); ++i)
    for (NodeId j = i + 1; j < t.size(); ++j) {
      const bool expect = distance(*t.nodes()[i].pos, *t.nodes()[j].pos) < c.cr_range &&
                          !(t.channels(i) & t.channels(j)).empty();
      EXPECT_EQ(t.adjacent(i, j), expect);
    }
}

TEST(Generate, SmallPresetAverageAvailabilityNearSeven) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto c = small_network_preset();
    c.seed = seed;
    for (const auto& n : generate(c).topology.nodes()) {
      total += static_cast<double>(n.channels.size());
      ++count;
    }
  }
  EXPECT_NEAR(total / static_cast<double>(count), 7.0, 1.0);
}

// A node at the centre sees a PU-coverage disk lying wholly inside the unit
// square, so each PU covers it with probability pi r^2.
double centre_mean_availability(const ScenarioConfig& c, int trials) {
  Rng rng(2024);
  const std::vector<Point> centre{{0.5, 0.5}};
  double sum = 0.0;
  for (int k = 0; k < trials; ++k) {
    std::vector<PrimaryUser> pus;
    for (std::size_t p = 0; p < c.n_pu; ++p) pus.push_back(detail::draw_pu(c, rng));
    sum += static_cast<double>(derive_availability(centre, pus, c.num_channels)[0].size());
  }
  return sum / trials;
}

TEST(Generate, PerChannelModelMatchesClosedForm) {
  ScenarioConfig c;
  const double cover = std::numbers::pi / 9.0;
  const double expected = 10.0 * std::pow(1.0 - cover * c.pu_active_prob, 10.0);
  EXPECT_NEAR(centre_mean_availability(c, 40000), expected, 0.05);
}

TEST(Generate, SingleChannelModelMatchesClosedForm) {
  auto c = small_network_preset();
  const double cover = std::numbers::pi / 9.0;
  const double expected = 10.0 * std::pow(1.0 - cover / 10.0, 10.0);
  EXPECT_NEAR(centre_mean_availability(c, 40000), expected, 0.05);
}

TEST(PuBatches, NineteenBatchesOfFive) {
  auto c = small_network_preset();
  auto s = generate(c);
  for (int b = 0; b < 19; ++b) s = add_pu_batch(std::move(s), 5);
  EXPECT_EQ(s.pus.size(), 105u);
  EXPECT_EQ(s.config.n_pu, 105u);
}

TEST(PuBatches, EmptyBatchIsIdentity) {
  const auto s = generate(small_network_preset());
  const auto t = add_pu_batch(s, 0);
  EXPECT_EQ(t.pus, s.pus);
  EXPECT_EQ(t.rng, s.rng);
  EXPECT_EQ(t.topology.edges(), s.topology.edges());
}

TEST(PuBatches, InactivePusChangeNothing) {
  ScenarioConfig c;
  c.pu_active_prob = 0.0;
  const auto s = generate(c);
  const auto t = add_pu_batch(s, 5);
  for (NodeId i = 0; i < s.topology.size(); ++i) EXPECT_EQ(t.topology.channels(i), s.topology.channels(i));
  EXPECT_EQ(t.topology.edges(), s.topology.edges());
}

TEST(PuBatches, AvailabilityOnlyShrinks) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto c = small_network_preset();
    c.seed = seed;
    auto s = generate(c);
    for (int b = 0; b < 19; ++b) {
      auto next = add_pu_batch(s, 5);
      for (NodeId i = 0; i < s.topology.size(); ++i) {
        ASSERT_TRUE(next.topology.channels(i).is_subset_of(s.topology.channels(i)));
        EXPECT_EQ(next.topology.nodes()[i].pos->x, s.topology.nodes()[i].pos->x);
      }
      for (auto [a, bb] : next.topology.edges()) ASSERT_TRUE(s.topology.adjacent(a, bb));
      s = std::move(next);
    }
  }
}
