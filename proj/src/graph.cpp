// SPDX-License-Identifier: Apache-2.0
#include "mnnas/graph.hpp"

#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>

namespace mnnas {

Graph::Graph(int64_t num_nodes, std::vector<Edge> edges, std::vector<double> features,
             int64_t feature_dim, std::optional<int> label,
             std::optional<std::vector<int>> node_labels)
    : num_nodes_(num_nodes),
      edges_(std::move(edges)),
      features_(std::move(features)),
      feature_dim_(feature_dim),
      label_(label),
      node_labels_(std::move(node_labels)) {
  if (num_nodes_ < 0) throw std::invalid_argument("graph: negative node count");
  std::unordered_set<uint64_t> seen;
  seen.reserve(edges_.size() * 2);
  for (auto& e : edges_) {
    if (e.u == e.v)
      throw std::invalid_argument("graph: self loop at node " + std::to_string(e.u));
    if (e.u < 0 || e.v < 0 || e.u >= num_nodes_ || e.v >= num_nodes_)
      throw std::invalid_argument("graph: edge endpoint out of range (" + std::to_string(e.u) +
                                  "," + std::to_string(e.v) + ")");
    if (e.u > e.v) std::swap(e.u, e.v);
    const uint64_t key = static_cast<uint64_t>(e.u) * static_cast<uint64_t>(num_nodes_) +
                         static_cast<uint64_t>(e.v);
    if (!seen.insert(key).second)
      throw std::invalid_argument("graph: duplicate edge (" + std::to_string(e.u) + "," +
                                  std::to_string(e.v) + ")");
  }
  if (feature_dim_ < 0) throw std::invalid_argument("graph: negative feature dim");
  if (static_cast<int64_t>(features_.size()) != num_nodes_ * feature_dim_)
    throw std::invalid_argument("graph: features must hold exactly num_nodes rows");
  if (node_labels_ && static_cast<int64_t>(node_labels_->size()) != num_nodes_)
    throw std::invalid_argument("graph: node_labels must have one entry per node");
}

Graph Graph::structure_only(int64_t num_nodes, std::vector<Edge> edges) {
  return Graph(num_nodes, std::move(edges), {}, 0);
}

std::vector<int64_t> Graph::degrees() const {
  std::vector<int64_t> deg(static_cast<size_t>(num_nodes_), 0);
  for (const auto& e : edges_) {
    ++deg[static_cast<size_t>(e.u)];
    ++deg[static_cast<size_t>(e.v)];
  }
  return deg;
}

Graph Graph::with_features(std::vector<double> features, int64_t feature_dim) const {
  return Graph(num_nodes_, edges_, std::move(features), feature_dim, label_, node_labels_);
}

}  // namespace mnnas
