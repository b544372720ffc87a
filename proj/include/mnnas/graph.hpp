// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mnnas {

using NodeId = int32_t;

struct Edge {
  NodeId u;
  NodeId v;
  bool operator==(const Edge&) const = default;
};

// Immutable undirected graph with dense per-node features. Construction
// canonicalizes each edge to u < v and validates the structural invariants:
// no self loops, no duplicate edges, endpoints in range, and exactly one
// feature row per node.
class Graph {
 public:
  Graph(int64_t num_nodes, std::vector<Edge> edges, std::vector<double> features,
        int64_t feature_dim, std::optional<int> label = std::nullopt,
        std::optional<std::vector<int>> node_labels = std::nullopt);

  // Structure-only graph (feature_dim 0); features can be attached later.
  static Graph structure_only(int64_t num_nodes, std::vector<Edge> edges);

  int64_t num_nodes() const { return num_nodes_; }
  int64_t num_edges() const { return static_cast<int64_t>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  int64_t feature_dim() const { return feature_dim_; }
  std::span<const double> features() const { return features_; }  // row-major N x d
  std::span<const double> feature_row(NodeId i) const {
    return std::span<const double>(features_).subspan(static_cast<size_t>(i) * feature_dim_,
                                                      feature_dim_);
  }

  const std::optional<int>& label() const { return label_; }
  const std::optional<std::vector<int>>& node_labels() const { return node_labels_; }

  std::vector<int64_t> degrees() const;

  // New graph with the same structure/labels but different features.
  Graph with_features(std::vector<double> features, int64_t feature_dim) const;

 private:
  int64_t num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> features_;
  int64_t feature_dim_ = 0;
  std::optional<int> label_;
  std::optional<std::vector<int>> node_labels_;
};

}  // namespace mnnas
