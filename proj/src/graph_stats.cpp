// SPDX-License-Identifier: Apache-2.0
#include "mnnas/graph_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mnnas {

namespace {

void require_edges(const Graph& g) {
  if (g.num_edges() == 0) throw std::invalid_argument("degenerate graph: no edges");
}

}  // namespace

DegreeStats compute_degree_stats(const Graph& g) {
  require_edges(g);
  DegreeStats s;
  s.degrees = g.degrees();
  const double n = static_cast<double>(g.num_nodes());
  double sum = 0.0, sum_sq = 0.0;
  for (const int64_t d : s.degrees) {
    sum += static_cast<double>(d);
    sum_sq += static_cast<double>(d) * static_cast<double>(d);
  }
  s.mean_degree = sum / n;
  s.mean_square_degree = sum_sq / n;
  double prod = 0.0;
  for (const auto& e : g.edges())
    prod += static_cast<double>(s.degrees[e.u]) * static_cast<double>(s.degrees[e.v]);
  s.edge_degree_product_mean = prod / static_cast<double>(g.num_edges());
  const auto r = assortativity_edge_pearson(g);
  s.assortativity = r.value;
  s.assortativity_degenerate = r.degenerate;
  return s;
}

AssortativityResult assortativity_excess(const Graph& g) {
  require_edges(g);
  const auto deg = g.degrees();
  // Each undirected edge contributes both oriented pairs, so the two marginal
  // distributions coincide.
  const double m2 = 2.0 * static_cast<double>(g.num_edges());
  double sum_x = 0.0, sum_xx = 0.0, sum_xy = 0.0;
  for (const auto& e : g.edges()) {
    const double x = static_cast<double>(deg[e.u] - 1);
    const double y = static_cast<double>(deg[e.v] - 1);
    sum_x += x + y;
    sum_xx += x * x + y * y;
    sum_xy += 2.0 * x * y;
  }
  const double mean = sum_x / m2;
  const double var = sum_xx / m2 - mean * mean;
  if (var < kDegenerateTol) return {0.0, true};
  const double cov = sum_xy / m2 - mean * mean;
  return {cov / var, false};
}

AssortativityResult assortativity_edge_pearson(const Graph& g) {
  require_edges(g);
  const auto deg = g.degrees();
  const double m = static_cast<double>(g.num_edges());
  double prod = 0.0, half_sum = 0.0, half_sq = 0.0;
  for (const auto& e : g.edges()) {
    const double du = static_cast<double>(deg[e.u]);
    const double dv = static_cast<double>(deg[e.v]);
    prod += du * dv;
    half_sum += 0.5 * (du + dv);
    half_sq += 0.5 * (du * du + dv * dv);
  }
  const double mean_ends = half_sum / m;
  const double numerator = prod / m - mean_ends * mean_ends;
  const double denominator = half_sq / m - mean_ends * mean_ends;
  if (denominator < kDegenerateTol) return {0.0, true};
  return {numerator / denominator, false};
}

DegreeHistogram degree_histogram(const Graph& g, int64_t min_degree) {
  require_edges(g);
  if (min_degree < 1) throw std::invalid_argument("degree_histogram: min_degree must be >= 1");
  DegreeHistogram h;
  const auto deg = g.degrees();
  for (const int64_t d : deg) ++h.counts[d];
  int64_t n_fit = 0;
  double log_sum = 0.0;
  for (const int64_t d : deg) {
    if (d < min_degree) continue;
    ++n_fit;
    log_sum += std::log(static_cast<double>(d) / (static_cast<double>(min_degree) - 0.5));
  }
  h.power_law_alpha =
      (n_fit > 0 && log_sum > 0.0) ? 1.0 + static_cast<double>(n_fit) / log_sum : 0.0;
  return h;
}

std::vector<int> degree_quintile_groups(const Graph& g) {
  const int64_t n = g.num_nodes();
  if (n < 5) throw std::invalid_argument("degree_quintile_groups: need at least 5 nodes");
  const auto deg = g.degrees();
  std::vector<int64_t> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
    if (deg[a] != deg[b]) return deg[a] > deg[b];
    return a < b;
  });
  const int64_t base = n / 5;
  const int64_t extra = n % 5;  // leftover nodes land in the top groups
  std::vector<int> group(static_cast<size_t>(n), 0);
  int64_t pos = 0;
  for (int q = 0; q < 5; ++q) {
    const int64_t size = base + (q < extra ? 1 : 0);
    for (int64_t i = 0; i < size; ++i) group[static_cast<size_t>(order[pos++])] = q;
  }
  return group;
}

}  // namespace mnnas
