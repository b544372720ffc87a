// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mnnas/graph.hpp"

namespace mnnas {

class Rng;

// Everything needed to regenerate a dataset from scratch. Families:
//   ba   preferential attachment            (n, m)
//   er   Erdos-Renyi G(n, p)                (n, p)
//   rr   random d-regular (pairing model)   (n, d)
//   nw   Newman-Watts ring + shortcuts      (n, k, p)
//   sbm  stochastic block model             (block_sizes, p_in, p_out)
//   spurious_motif  base-motif classification graphs (bias, counts)
struct GeneratorSpec {
  std::string family;
  int64_t n = 0;
  int64_t m = 0;
  double p = 0.0;
  int64_t d = 0;
  int64_t k = 0;
  std::vector<int64_t> block_sizes;
  double p_in = 0.0;
  double p_out = 0.0;
  double bias = 1.0 / 3.0;
  int64_t train_count = 1;
  int64_t test_count = 0;
  uint64_t seed = 0;

  void validate() const;  // throws naming the violated constraint
};

Graph generate_ba(int64_t n, int64_t m, Rng& rng);
Graph generate_er(int64_t n, double p, Rng& rng);
Graph generate_rr(int64_t n, int64_t d, Rng& rng);
Graph generate_nw(int64_t n, int64_t k, double p, Rng& rng);
// Block labels are stored as node_labels (ground truth for evaluation only).
Graph generate_sbm(const std::vector<int64_t>& block_sizes, double p_in, double p_out,
                   Rng& rng);

// One base shape (tree | ladder | wheel, 10-20 nodes) joined by a single
// bridge edge to one motif (cycle | house | crane, 5-6 nodes); the label is
// the motif index. Train split: base matches the motif index with probability
// `bias`, otherwise uniform over the two others. Test split: base uniform.
std::vector<Graph> generate_spurious_motif(double bias, int64_t count, uint64_t seed,
                                           bool test_split);

// The base/motif index draw behind generate_spurious_motif, exposed so the
// correlation structure can be measured directly.
struct MotifSample {
  int base = 0;
  int motif = 0;
};
MotifSample sample_motif_pair(double bias, bool test_split, Rng& rng);

// [1] ++ one-hot(min(degree, 10)): 12 dims, shared by every synthetic family.
Graph attach_degree_features(const Graph& g);
inline constexpr int64_t kDegreeFeatureDim = 12;

// Single graph for the one-graph families (everything except spurious_motif).
Graph generate(const GeneratorSpec& spec);

struct DatasetBundle {
  std::vector<Graph> train;
  std::vector<Graph> test;
};

// Full train/test bundle for any family, deterministic in spec.seed.
DatasetBundle generate_dataset(const GeneratorSpec& spec);

bool is_connected(const Graph& g);

}  // namespace mnnas
