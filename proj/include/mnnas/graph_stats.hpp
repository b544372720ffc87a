// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <vector>

#include "mnnas/graph.hpp"

namespace mnnas {

// Assortativity of a regular graph has a zero-variance denominator; such
// results carry the degenerate flag and a value of 0 so downstream structure
// features stay defined.
struct AssortativityResult {
  double value = 0.0;
  bool degenerate = false;
};

struct DegreeStats {
  std::vector<int64_t> degrees;
  double mean_degree = 0.0;
  double mean_square_degree = 0.0;
  // (1/|E|) * sum over edges of d_u * d_v.
  double edge_degree_product_mean = 0.0;
  double assortativity = 0.0;
  bool assortativity_degenerate = false;
};

// Tolerance below which an assortativity denominator counts as zero.
inline constexpr double kDegenerateTol = 1e-12;

// Degree summary plus the edge-statistic assortativity. Throws on an empty
// edge set ("degenerate graph: no edges").
DegreeStats compute_degree_stats(const Graph& g);

// Pearson correlation of remaining degrees (degree - 1) paired over the
// symmetrized edge list.
AssortativityResult assortativity_excess(const Graph& g);

// Assortativity from edge-degree statistics:
//   (mean(d_u d_v) - mean((d_u + d_v)/2)^2) /
//   (mean((d_u^2 + d_v^2)/2) - mean((d_u + d_v)/2)^2)
// with means taken over the undirected edge list.
AssortativityResult assortativity_edge_pearson(const Graph& g);

struct DegreeHistogram {
  std::map<int64_t, int64_t> counts;
  // Discrete MLE exponent 1 + n / sum(ln(d_i / (min_degree - 0.5))) over
  // nodes with d_i >= min_degree. Diagnostic only.
  double power_law_alpha = 0.0;
};

DegreeHistogram degree_histogram(const Graph& g, int64_t min_degree = 1);

// Nodes ranked by degree descending (ties by node index ascending) and split
// into 5 groups; when sizes do not divide evenly the leftover nodes go to the
// highest-degree groups. Group 0 holds the highest degrees.
std::vector<int> degree_quintile_groups(const Graph& g);

}  // namespace mnnas
