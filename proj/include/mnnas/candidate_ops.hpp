// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mnnas/graph.hpp"
#include "mnnas/tensor.hpp"

namespace mnnas {

class Rng;

// Message-routing arrays for one graph, precomputed once and shared by every
// candidate operation and layer. Entry e of (src, dst) is a directed message
// src[e] -> dst[e]; both orientations of each undirected edge are present.
struct GraphContext {
  int64_t num_nodes = 0;
  std::vector<int64_t> src, dst;          // neighbor messages
  std::vector<int64_t> gcn_src, gcn_dst;  // neighbor messages plus self loops
  Tensor gcn_coeff;    // (|gcn_src|, 1) symmetric normalization 1/sqrt((d_u+1)(d_v+1))
  Tensor inv_degree;   // (n, 1) 1/deg, 0 for isolated nodes

  explicit GraphContext(const Graph& g);
};

// One candidate operation with its own weights (shared across graphs, nodes,
// and search dimensions). Maps (n, d_in) embeddings to (n, d_out).
class CandidateOp {
 public:
  CandidateOp(std::string name, int64_t d_in, int64_t d_out)
      : name_(std::move(name)), d_in_(d_in), d_out_(d_out) {}
  virtual ~CandidateOp() = default;

  const std::string& name() const { return name_; }
  int64_t d_in() const { return d_in_; }
  int64_t d_out() const { return d_out_; }

  virtual Tensor apply(const GraphContext& ctx, const Tensor& h) const = 0;
  virtual std::vector<Tensor> parameters() = 0;
  virtual void init(Rng& rng) = 0;
  int64_t param_count();

 protected:
  std::string name_;
  int64_t d_in_;
  int64_t d_out_;
};

std::unique_ptr<CandidateOp> make_candidate_op(const std::string& name, int64_t d_in,
                                               int64_t d_out);

// {"gcn", "gin", "sage_mean", "graphconv", "linear"}
const std::vector<std::string>& default_op_names();

// The ordered K candidate operations of one layer. The order is part of the
// checkpoint contract: index k always denotes the same operation.
class OperationSet {
 public:
  OperationSet(const std::vector<std::string>& names, int64_t d_in, int64_t d_out);

  int64_t size() const { return static_cast<int64_t>(ops_.size()); }
  CandidateOp& op(int64_t k) { return *ops_[static_cast<size_t>(k)]; }
  const CandidateOp& op(int64_t k) const { return *ops_[static_cast<size_t>(k)]; }
  std::vector<std::string> names() const;

  // E_i[k] = o_k(h)_i for all k; exactly K op evaluations (counted, so tests
  // can assert the mapped embeddings are computed only once per layer).
  std::vector<Tensor> apply_all(const GraphContext& ctx, const Tensor& h) const;

  std::vector<Tensor> parameters();
  int64_t param_count();
  void init(Rng& rng);

  int64_t eval_count() const { return eval_count_; }
  void reset_eval_count() { eval_count_ = 0; }

 private:
  std::vector<std::unique_ptr<CandidateOp>> ops_;
  mutable int64_t eval_count_ = 0;
};

}  // namespace mnnas
