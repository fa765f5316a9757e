#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "crn/channel_set.hpp"
#include "crn/config.hpp"
#include "crn/rng.hpp"
#include "crn/topology.hpp"

namespace crn {

struct PrimaryUser {
  Point pos;
  double range = 0.0;
  ChannelSet active_channels;
  friend bool operator==(const PrimaryUser&, const PrimaryUser&) = default;
};

/// A topology together with the primary users that shaped its availability
/// and the generator state for further draws.
struct ScenarioState {
  ScenarioConfig config;
  Topology topology;
  std::vector<PrimaryUser> pus;
  Rng rng;
};

/// K_i = all channels minus those occupied by any PU with d(i, p) < p.range.
inline std::vector<ChannelSet> derive_availability(std::span<const Point> nodes,
                                                   std::span<const PrimaryUser> pus,
                                                   std::size_t num_channels) {
  std::vector<ChannelSet> out;
  out.reserve(nodes.size());
  const auto all = ChannelSet::full(num_channels);
  for (const auto& p : nodes) {
    ChannelSet k = all;
    for (const auto& pu : pus)
      if (distance(p, pu.pos) < pu.range) k -= pu.active_channels;
    out.push_back(k);
  }
  return out;
}

namespace detail {

inline PrimaryUser draw_pu(const ScenarioConfig& c, Rng& rng) {
  PrimaryUser pu;
  pu.pos.x = rng.uniform(0.0, c.area_side);
  pu.pos.y = rng.uniform(0.0, c.area_side);
  pu.range = c.pu_range;
  switch (c.pu_channel_model) {
    case PuChannelModel::PerChannel:
      for (Channel ch = 0; ch < c.num_channels; ++ch)
        if (rng.bernoulli(c.pu_active_prob)) pu.active_channels.insert(ch);
      break;
    case PuChannelModel::SingleChannel:
      pu.active_channels.insert(static_cast<Channel>(rng.below(c.num_channels)));
      break;
  }
  return pu;
}

inline std::vector<Point> positions(const Topology& t) {
  std::vector<Point> out;
  out.reserve(t.size());
  for (const auto& n : t.nodes()) {
    if (!n.pos) throw std::logic_error("scenario operation needs node positions");
    out.push_back(*n.pos);
  }
  return out;
}

inline void refresh_spectrum(ScenarioState& s) {
  const auto pts = positions(s.topology);
  const auto avail = derive_availability(pts, s.pus, s.config.num_channels);
  for (NodeId i = 0; i < s.topology.size(); ++i) s.topology.set_channels(i, avail[i]);
  s.topology.derive_unit_disk_edges(s.config.cr_range);
}

}  // namespace detail

/**
 * Draw order from the seed: CR positions (x then y, ascending ID), then for
 * each PU its position followed by its channel draws. Equal configs give
 * bit-identical states.
 */
inline ScenarioState generate(const ScenarioConfig& config) {
  config.validate();
  ScenarioState s{config, Topology(config.num_channels), {}, Rng(config.seed)};
  for (std::size_t i = 0; i < config.n_cr; ++i) {
    Point p;
    p.x = s.rng.uniform(0.0, config.area_side);
    p.y = s.rng.uniform(0.0, config.area_side);
    s.topology.add_node(ChannelSet::full(config.num_channels), p);
  }
  for (std::size_t k = 0; k < config.n_pu; ++k) s.pus.push_back(detail::draw_pu(config, s.rng));
  detail::refresh_spectrum(s);
  return s;
}

/// Appends `batch_size` PUs drawn from the state's generator and recomputes
/// availability and adjacency. Existing nodes and PUs are not moved.
inline ScenarioState add_pu_batch(ScenarioState s, std::size_t batch_size) {
  if (batch_size == 0) return s;
  for (std::size_t k = 0; k < batch_size; ++k) s.pus.push_back(detail::draw_pu(s.config, s.rng));
  s.config.n_pu = s.pus.size();
  detail::refresh_spectrum(s);
  return s;
}

}  // namespace crn
