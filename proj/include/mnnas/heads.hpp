// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "mnnas/graph.hpp"
#include "mnnas/tensor.hpp"

namespace mnnas {

// Task losses and metrics. The differentiable losses are built from tensor
// ops so gradients flow back into the model; the metrics are plain doubles
// over argmaxed assignments.

struct TaskMetrics {
  std::string task;
  std::map<std::string, double> metrics;
  double loss = 0.0;
};

// Mean-pool node representations and project with the head: (1, C) logits.
Tensor classify_logits(const Tensor& node_repr, const Tensor& head_w);

// Softmax cross-entropy of a (1, C) logits row against an integer label,
// computed via log-sum-exp. Throws if the label is out of range.
Tensor cross_entropy(const Tensor& logits, int label);

int argmax_class(const Tensor& logits);

// Per-node soft cluster assignment: softmax(node_repr @ head_w), rows on the
// C-simplex.
Tensor soft_assignment(const Tensor& node_repr, const Tensor& head_w);

std::vector<int> argmax_rows(const Tensor& assign);

// Negated soft modularity: Q = (1/2m) sum_ij (A_ij - d_i d_j / 2m) (S S^T)_ij,
// evaluated edge-wise plus a degree-term correction so A is never formed.
Tensor soft_modularity_loss(const Graph& g, const Tensor& assign);

// Newman modularity of a hard partition.
double hard_modularity(const Graph& g, const std::vector<int>& assign);

// Soft intra-edge probability plus balance and entropy penalties. The edge
// term alone is minimized by uniform rows, so the penalties keep assignments
// near-hard and clusters near-equal-sized.
Tensor inverse_partition_loss(const Graph& g, const Tensor& assign,
                              double lambda_bal = 1.0, double lambda_ent = 0.1);

// Fraction of edges whose endpoints land in different clusters.
double inter_edge_ratio(const Graph& g, const std::vector<int>& assign);

}  // namespace mnnas
