// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mnnas/graph.hpp"
#include "mnnas/graph_stats.hpp"
#include "mnnas/rng.hpp"

using namespace mnnas;

namespace {

Graph path4() { return Graph::structure_only(4, {{0, 1}, {1, 2}, {2, 3}}); }
Graph path3() { return Graph::structure_only(3, {{0, 1}, {1, 2}}); }
Graph star(int leaves) {
  std::vector<Edge> edges;
  for (NodeId i = 1; i <= leaves; ++i) edges.push_back({0, i});
  return Graph::structure_only(leaves + 1, std::move(edges));
}
Graph cycle(int n) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) edges.push_back({i, static_cast<NodeId>((i + 1) % n)});
  return Graph::structure_only(n, std::move(edges));
}

Graph random_er(int64_t n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) edges.push_back({u, v});
  if (edges.empty()) edges.push_back({0, 1});
  return Graph::structure_only(n, edges);
}

// preferential attachment, enough for a skewed degree sequence
Graph random_ba(int64_t n, int64_t m, Rng& rng) {
  std::vector<Edge> edges;
  std::vector<NodeId> ends;  // endpoint multiset, degree-proportional sampling
  for (NodeId v = 1; v < m + 1 && v < n; ++v) {
    edges.push_back({0, v});
    ends.push_back(0);
    ends.push_back(v);
  }
  for (NodeId v = static_cast<NodeId>(m + 1); v < n; ++v) {
    std::vector<NodeId> targets;
    while (static_cast<int64_t>(targets.size()) < m) {
      const NodeId t = ends[rng.uniform_index(ends.size())];
      bool dup = false;
      for (NodeId w : targets) dup = dup || (w == t);
      if (!dup) targets.push_back(t);
    }
    for (NodeId t : targets) {
      edges.push_back({t, v});
      ends.push_back(t);
      ends.push_back(v);
    }
  }
  return Graph::structure_only(n, std::move(edges));
}

}  // namespace

TEST_CASE("stats: P4 degree summary") {
  const auto s = compute_degree_stats(path4());
  CHECK(s.degrees == std::vector<int64_t>{1, 2, 2, 1});
  CHECK(s.mean_degree == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(s.mean_square_degree == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(s.edge_degree_product_mean == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(s.assortativity == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK_FALSE(s.assortativity_degenerate);
}

TEST_CASE("stats: star mean degree") {
  const auto s = compute_degree_stats(star(4));
  CHECK(s.mean_degree == doctest::Approx(1.6).epsilon(1e-12));
}

TEST_CASE("stats: empty edge set is an error") {
  Graph g = Graph::structure_only(3, {});
  CHECK_THROWS_WITH_AS(compute_degree_stats(g), "degenerate graph: no edges",
                       std::invalid_argument);
  CHECK_THROWS_AS(assortativity_excess(g), std::invalid_argument);
  CHECK_THROWS_AS(assortativity_edge_pearson(g), std::invalid_argument);
}

TEST_CASE("stats: excess-degree assortativity on the worked examples") {
  const auto p4 = assortativity_excess(path4());
  CHECK(p4.value == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK_FALSE(p4.degenerate);

  const auto k14 = assortativity_excess(star(4));
  CHECK(k14.value == doctest::Approx(-1.0).epsilon(1e-12));

  const auto c5 = assortativity_excess(cycle(5));
  CHECK(c5.value == 0.0);
  CHECK(c5.degenerate);
}

TEST_CASE("stats: edge-statistic assortativity on the worked examples") {
  const auto p4 = assortativity_edge_pearson(path4());
  CHECK(p4.value == doctest::Approx(-0.5).epsilon(1e-12));

  // (2 - 2.25) / (2.5 - 2.25), exactly representable
  const auto p3 = assortativity_edge_pearson(path3());
  CHECK(p3.value == -1.0);

  const auto c5 = assortativity_edge_pearson(cycle(5));
  CHECK(c5.value == 0.0);
  CHECK(c5.degenerate);
}

TEST_CASE("stats: the two assortativity forms agree on random graphs") {
  Rng rng(20240817);
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    Graph g = (trial % 2 == 0) ? random_er(8 + static_cast<int64_t>(rng.uniform_index(60)),
                                           0.05 + 0.3 * rng.uniform(), rng)
                               : random_ba(10 + static_cast<int64_t>(rng.uniform_index(60)),
                                           1 + static_cast<int64_t>(rng.uniform_index(3)), rng);
    const auto a = assortativity_excess(g);
    const auto b = assortativity_edge_pearson(g);
    REQUIRE(a.degenerate == b.degenerate);
    CHECK(a.value >= -1.0 - 1e-9);
    CHECK(a.value <= 1.0 + 1e-9);
    CHECK(b.value >= -1.0 - 1e-9);
    CHECK(b.value <= 1.0 + 1e-9);
    if (!a.degenerate) {
      CHECK(std::fabs(a.value - b.value) < 1e-9);
      ++checked;
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("stats: degree histograms") {
  const auto h_star = degree_histogram(star(4));
  CHECK(h_star.counts == std::map<int64_t, int64_t>{{1, 4}, {4, 1}});
  CHECK(h_star.power_law_alpha > 1.0);

  const auto h_c5 = degree_histogram(cycle(5));
  CHECK(h_c5.counts == std::map<int64_t, int64_t>{{2, 5}});

  CHECK_THROWS_AS(degree_histogram(path4(), 0), std::invalid_argument);
}

TEST_CASE("quintiles: group sizes are exact for 10 nodes") {
  Rng rng(5);
  Graph g = random_er(10, 0.4, rng);
  const auto groups = degree_quintile_groups(g);
  std::vector<int> sizes(5, 0);
  for (int q : groups) ++sizes[static_cast<size_t>(q)];
  CHECK(sizes == std::vector<int>{2, 2, 2, 2, 2});
  // higher degree never lands in a later group
  const auto deg = g.degrees();
  for (size_t a = 0; a < groups.size(); ++a)
    for (size_t b = 0; b < groups.size(); ++b)
      if (deg[a] > deg[b]) CHECK(groups[a] <= groups[b]);
}

TEST_CASE("quintiles: all-equal degrees fall back to node index") {
  const auto groups = degree_quintile_groups(cycle(10));
  for (int i = 0; i < 10; ++i) CHECK(groups[static_cast<size_t>(i)] == i / 2);
}

TEST_CASE("quintiles: star hub anchors group 0") {
  const auto groups = degree_quintile_groups(star(9));
  CHECK(groups[0] == 0);  // hub
  CHECK(groups[1] == 0);  // first leaf joins by index tie-break
  CHECK(groups[2] == 1);
  CHECK(groups[9] == 4);
}

TEST_CASE("quintiles: partition covers every node, sizes differ by at most 1") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int64_t n = 5 + static_cast<int64_t>(rng.uniform_index(50));
    Graph g = random_er(n, 0.15, rng);
    const auto groups = degree_quintile_groups(g);
    REQUIRE(static_cast<int64_t>(groups.size()) == n);
    std::vector<int64_t> sizes(5, 0);
    for (int q : groups) {
      REQUIRE(q >= 0);
      REQUIRE(q < 5);
      ++sizes[static_cast<size_t>(q)];
    }
    int64_t mn = sizes[0], mx = sizes[0];
    for (int64_t s : sizes) {
      mn = std::min(mn, s);
      mx = std::max(mx, s);
    }
    CHECK(mx - mn <= 1);
  }
}

TEST_CASE("quintiles: fewer than 5 nodes is an error") {
  CHECK_THROWS_AS(degree_quintile_groups(path3()), std::invalid_argument);
}
