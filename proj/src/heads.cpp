// SPDX-License-Identifier: Apache-2.0
#include "mnnas/heads.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mnnas {

namespace {

void require_edges(const Graph& g, const char* what) {
  if (g.num_edges() == 0)
    throw std::invalid_argument(std::string(what) + ": graph has no edges");
}

void require_assign_rows(const Graph& g, const Tensor& assign, const char* what) {
  if (assign.rows() != g.num_nodes())
    throw std::invalid_argument(std::string(what) +
                                ": assignment must have one row per node");
}

// Gathered endpoint rows of the symmetrized-but-canonical edge list.
std::pair<Tensor, Tensor> edge_endpoint_rows(const Graph& g, const Tensor& assign) {
  std::vector<int64_t> us, vs;
  us.reserve(static_cast<size_t>(g.num_edges()));
  vs.reserve(static_cast<size_t>(g.num_edges()));
  for (const auto& e : g.edges()) {
    us.push_back(e.u);
    vs.push_back(e.v);
  }
  return {ops::row_gather(assign, us), ops::row_gather(assign, vs)};
}

Tensor degree_column(const Graph& g) {
  const auto degs = g.degrees();
  std::vector<double> d(degs.begin(), degs.end());
  return Tensor::from_values({g.num_nodes(), 1}, std::move(d));
}

}  // namespace

Tensor classify_logits(const Tensor& node_repr, const Tensor& head_w) {
  return ops::matmul(ops::mean(node_repr, 0), head_w);
}

Tensor cross_entropy(const Tensor& logits, int label) {
  if (logits.rows() != 1)
    throw std::invalid_argument("cross_entropy: expected a single logits row");
  const int64_t classes = logits.cols();
  if (label < 0 || label >= classes)
    throw std::invalid_argument("cross_entropy: label " + std::to_string(label) +
                                " out of range for " + std::to_string(classes) +
                                " classes");
  // log-sum-exp with the max pulled out as a constant shift.
  const auto v = logits.values();
  const double mx = *std::max_element(v.begin(), v.end());
  Tensor lse = ops::add_scalar(
      ops::log(ops::sum(ops::exp(ops::add_scalar(logits, -mx)), 1)), mx);
  return ops::sum_all(ops::sub(lse, ops::col_slice(logits, label)));
}

int argmax_class(const Tensor& logits) {
  const auto v = logits.values();
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

Tensor soft_assignment(const Tensor& node_repr, const Tensor& head_w) {
  return ops::softmax_rows(ops::matmul(node_repr, head_w));
}

std::vector<int> argmax_rows(const Tensor& assign) {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(assign.rows()));
  for (int64_t i = 0; i < assign.rows(); ++i) {
    int best = 0;
    for (int64_t c = 1; c < assign.cols(); ++c)
      if (assign.at(i, c) > assign.at(i, best)) best = static_cast<int>(c);
    out.push_back(best);
  }
  return out;
}

Tensor soft_modularity_loss(const Graph& g, const Tensor& assign) {
  require_edges(g, "soft modularity");
  require_assign_rows(g, assign, "soft modularity");
  const double m = static_cast<double>(g.num_edges());
  auto [urows, vrows] = edge_endpoint_rows(g, assign);
  // (1/2m) * sum_ij A_ij (S S^T)_ij = (1/m) * sum over canonical edges.
  Tensor edge_term = ops::scalar_mul(ops::sum_all(ops::mul(urows, vrows)), 1.0 / m);
  // (1/2m)^2 * sum_c (sum_i d_i S_ic)^2
  Tensor weighted = ops::sum(ops::scale_rows(assign, degree_column(g)), 0);  // (1, C)
  Tensor degree_term =
      ops::scalar_mul(ops::sum_all(ops::mul(weighted, weighted)), 1.0 / (4.0 * m * m));
  return ops::sub(degree_term, edge_term);  // -Q
}

double hard_modularity(const Graph& g, const std::vector<int>& assign) {
  require_edges(g, "hard modularity");
  if (static_cast<int64_t>(assign.size()) != g.num_nodes())
    throw std::invalid_argument("hard modularity: assignment must cover every node");
  const double m = static_cast<double>(g.num_edges());
  double intra = 0.0;
  for (const auto& e : g.edges())
    if (assign[static_cast<size_t>(e.u)] == assign[static_cast<size_t>(e.v)]) intra += 1.0;
  const int clusters =
      assign.empty() ? 0 : *std::max_element(assign.begin(), assign.end()) + 1;
  std::vector<double> cluster_degree(static_cast<size_t>(std::max(clusters, 1)), 0.0);
  const auto degs = g.degrees();
  for (int64_t i = 0; i < g.num_nodes(); ++i) {
    const int c = assign[static_cast<size_t>(i)];
    if (c < 0) throw std::invalid_argument("hard modularity: negative cluster id");
    cluster_degree[static_cast<size_t>(c)] += static_cast<double>(degs[static_cast<size_t>(i)]);
  }
  double degree_term = 0.0;
  for (double dc : cluster_degree) degree_term += (dc / (2.0 * m)) * (dc / (2.0 * m));
  return intra / m - degree_term;
}

Tensor inverse_partition_loss(const Graph& g, const Tensor& assign, double lambda_bal,
                              double lambda_ent) {
  require_edges(g, "inverse partition");
  require_assign_rows(g, assign, "inverse partition");
  const double m = static_cast<double>(g.num_edges());
  const double inv_c = 1.0 / static_cast<double>(assign.cols());
  auto [urows, vrows] = edge_endpoint_rows(g, assign);
  Tensor intra = ops::scalar_mul(ops::sum_all(ops::mul(urows, vrows)), 1.0 / m);

  Tensor col_dev = ops::add_scalar(ops::mean(assign, 0), -inv_c);  // (1, C)
  Tensor balance = ops::sum_all(ops::mul(col_dev, col_dev));

  // Mean row entropy; the clamp keeps log finite at exact zeros, whose
  // entropy contribution is zero anyway.
  Tensor plogp = ops::mul(assign, ops::log(ops::clamp_min(assign, 1e-12)));
  Tensor entropy =
      ops::scalar_mul(ops::sum_all(plogp), -1.0 / static_cast<double>(assign.rows()));

  return ops::add(intra, ops::add(ops::scalar_mul(balance, lambda_bal),
                                  ops::scalar_mul(entropy, lambda_ent)));
}

double inter_edge_ratio(const Graph& g, const std::vector<int>& assign) {
  require_edges(g, "inter-edge ratio");
  if (static_cast<int64_t>(assign.size()) != g.num_nodes())
    throw std::invalid_argument("inter-edge ratio: assignment must cover every node");
  double inter = 0.0;
  for (const auto& e : g.edges())
    if (assign[static_cast<size_t>(e.u)] != assign[static_cast<size_t>(e.v)]) inter += 1.0;
  return inter / static_cast<double>(g.num_edges());
}

}  // namespace mnnas
