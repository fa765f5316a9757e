// Searches the undrawn links of the example network for edge sets that
// satisfy every stated fact. Prints the best candidates by soft-check count.
#include <algorithm>
#include <cstdio>
#include <vector>

#include "crn/fixture.hpp"

using namespace crn;

int main() {
  std::vector<example_net::Edge> free_pairs;
  auto pinned = [](NodeId a, NodeId b) {
    for (auto [x, y] : example_net::kPinnedEdges)
      if ((x == a && y == b) || (x == b && y == a)) return true;
    return false;
  };
  for (NodeId a = 0; a < example_net::kNodes; ++a)
    for (NodeId b = a + 1; b < example_net::kNodes; ++b)
      if (!pinned(a, b) && a != example_net::H && b != example_net::H) free_pairs.push_back({a, b});

  struct Hit {
    std::vector<example_net::Edge> edges;
    example_net::Report report;
  };
  std::vector<Hit> hits;
  std::size_t hard = 0;
  const std::size_t total = std::size_t{1} << free_pairs.size();
  for (std::size_t mask = 0; mask < total; ++mask) {
    std::vector<example_net::Edge> extra;
    for (std::size_t k = 0; k < free_pairs.size(); ++k)
      if (mask >> k & 1U) extra.push_back(free_pairs[k]);
    const auto t = example_net::topology(extra);
    const auto cvh = connectivity_vector(t, example_net::H), cvb = connectivity_vector(t, example_net::B);
    if (cvh.g != 2 || cvb.g != 1 || cvh.d != cvb.d) continue;
    auto rep = example_net::check(t);
    if (!rep.hard_ok()) continue;
    ++hard;
    hits.push_back({std::move(extra), std::move(rep)});
  }
  std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.report.soft_passed() != b.report.soft_passed()) return a.report.soft_passed() > b.report.soft_passed();
    return a.edges.size() < b.edges.size();
  });
  std::printf("searched %zu edge sets, %zu satisfy every exact fact\n", total, hard);
  for (std::size_t k = 0; k < std::min<std::size_t>(hits.size(), 8); ++k) {
    std::printf("soft %zu:", hits[k].report.soft_passed());
    for (auto [a, b] : hits[k].edges) std::printf(" %s-%s", example_net::name(a).c_str(), example_net::name(b).c_str());
    std::printf("\n");
    for (const auto& c : hits[k].report.checks)
      std::printf("  %-28s %s  %s\n", c.name.c_str(), c.ok ? "ok " : "BAD", c.detail.c_str());
  }
  return hits.empty() ? 1 : 0;
}
