// SPDX-License-Identifier: Apache-2.0
#include "mnnas/candidate_ops.hpp"

#include <cmath>
#include <stdexcept>

#include "mnnas/rng.hpp"

namespace mnnas {

namespace O = ops;

GraphContext::GraphContext(const Graph& g) : num_nodes(g.num_nodes()) {
  const auto deg = g.degrees();
  src.reserve(2 * g.num_edges());
  dst.reserve(2 * g.num_edges());
  for (const auto& e : g.edges()) {
    src.push_back(e.u);
    dst.push_back(e.v);
    src.push_back(e.v);
    dst.push_back(e.u);
  }
  gcn_src = src;
  gcn_dst = dst;
  std::vector<double> coeff;
  coeff.reserve(src.size() + static_cast<size_t>(num_nodes));
  for (size_t e = 0; e < src.size(); ++e) {
    const double du = static_cast<double>(deg[static_cast<size_t>(src[e])]) + 1.0;
    const double dv = static_cast<double>(deg[static_cast<size_t>(dst[e])]) + 1.0;
    coeff.push_back(1.0 / std::sqrt(du * dv));
  }
  std::vector<double> inv(static_cast<size_t>(num_nodes));
  for (int64_t i = 0; i < num_nodes; ++i) {
    gcn_src.push_back(i);  // self loop
    gcn_dst.push_back(i);
    coeff.push_back(1.0 / (static_cast<double>(deg[static_cast<size_t>(i)]) + 1.0));
    inv[static_cast<size_t>(i)] =
        deg[static_cast<size_t>(i)] > 0 ? 1.0 / static_cast<double>(deg[static_cast<size_t>(i)])
                                        : 0.0;
  }
  const int64_t num_messages = static_cast<int64_t>(coeff.size());
  gcn_coeff = Tensor::from_values({num_messages, 1}, std::move(coeff));
  inv_degree = Tensor::from_values({num_nodes, 1}, std::move(inv));
}

int64_t CandidateOp::param_count() {
  int64_t total = 0;
  for (auto& p : parameters()) total += p.numel();
  return total;
}

namespace {

void check_input(const CandidateOp& op, const GraphContext& ctx, const Tensor& h) {
  if (h.rows() != ctx.num_nodes || h.cols() != op.d_in())
    throw std::invalid_argument(op.name() + ": expected (" + std::to_string(ctx.num_nodes) + "x" +
                                std::to_string(op.d_in()) + ") embeddings, got (" +
                                std::to_string(h.rows()) + "x" + std::to_string(h.cols()) + ")");
}

// sum over neighbors j of i of rows[j]
Tensor neighbor_sum(const GraphContext& ctx, const Tensor& rows) {
  return O::segment_sum(O::row_gather(rows, ctx.src), ctx.dst, ctx.num_nodes);
}

class GcnOp final : public CandidateOp {
 public:
  GcnOp(int64_t d_in, int64_t d_out)
      : CandidateOp("gcn", d_in, d_out), w_(Tensor::zeros({d_in, d_out}, true)) {}

  Tensor apply(const GraphContext& ctx, const Tensor& h) const override {
    check_input(*this, ctx, h);
    Tensor hw = O::matmul(h, w_);
    Tensor msgs = O::scale_rows(O::row_gather(hw, ctx.gcn_src), ctx.gcn_coeff);
    return O::segment_sum(msgs, ctx.gcn_dst, ctx.num_nodes);
  }
  std::vector<Tensor> parameters() override { return {w_}; }
  void init(Rng& rng) override { fill_xavier_uniform(w_, d_in_, d_out_, rng); }

 private:
  Tensor w_;
};

class GinOp final : public CandidateOp {
 public:
  GinOp(int64_t d_in, int64_t d_out)
      : CandidateOp("gin", d_in, d_out),
        w_hidden_(Tensor::zeros({d_in, d_out}, true)),
        w_out_(Tensor::zeros({d_out, d_out}, true)),
        eps_(Tensor::scalar(0.0, true)) {}

  Tensor apply(const GraphContext& ctx, const Tensor& h) const override {
    check_input(*this, ctx, h);
    Tensor pre = O::add(O::mul(h, O::add_scalar(eps_, 1.0)), neighbor_sum(ctx, h));
    return O::matmul(O::relu(O::matmul(pre, w_hidden_)), w_out_);
  }
  std::vector<Tensor> parameters() override { return {w_hidden_, w_out_, eps_}; }
  void init(Rng& rng) override {
    fill_xavier_uniform(w_hidden_, d_in_, d_out_, rng);
    fill_xavier_uniform(w_out_, d_out_, d_out_, rng);
    eps_.mutable_values()[0] = 0.0;
  }

 private:
  Tensor w_hidden_, w_out_, eps_;
};

class SageMeanOp final : public CandidateOp {
 public:
  SageMeanOp(int64_t d_in, int64_t d_out)
      : CandidateOp("sage_mean", d_in, d_out),
        w_self_(Tensor::zeros({d_in, d_out}, true)),
        w_neigh_(Tensor::zeros({d_in, d_out}, true)) {}

  Tensor apply(const GraphContext& ctx, const Tensor& h) const override {
    check_input(*this, ctx, h);
    Tensor mean = O::scale_rows(neighbor_sum(ctx, h), ctx.inv_degree);
    return O::add(O::matmul(h, w_self_), O::matmul(mean, w_neigh_));
  }
  std::vector<Tensor> parameters() override { return {w_self_, w_neigh_}; }
  void init(Rng& rng) override {
    fill_xavier_uniform(w_self_, d_in_, d_out_, rng);
    fill_xavier_uniform(w_neigh_, d_in_, d_out_, rng);
  }

 private:
  Tensor w_self_, w_neigh_;
};

class GraphConvOp final : public CandidateOp {
 public:
  GraphConvOp(int64_t d_in, int64_t d_out)
      : CandidateOp("graphconv", d_in, d_out),
        w_self_(Tensor::zeros({d_in, d_out}, true)),
        w_neigh_(Tensor::zeros({d_in, d_out}, true)) {}

  Tensor apply(const GraphContext& ctx, const Tensor& h) const override {
    check_input(*this, ctx, h);
    // W2 applied before aggregation; identical result, fewer large matmuls
    return O::add(O::matmul(h, w_self_), neighbor_sum(ctx, O::matmul(h, w_neigh_)));
  }
  std::vector<Tensor> parameters() override { return {w_self_, w_neigh_}; }
  void init(Rng& rng) override {
    fill_xavier_uniform(w_self_, d_in_, d_out_, rng);
    fill_xavier_uniform(w_neigh_, d_in_, d_out_, rng);
  }

 private:
  Tensor w_self_, w_neigh_;
};

class LinearOp final : public CandidateOp {
 public:
  LinearOp(int64_t d_in, int64_t d_out)
      : CandidateOp("linear", d_in, d_out), w_(Tensor::zeros({d_in, d_out}, true)) {}

  Tensor apply(const GraphContext& ctx, const Tensor& h) const override {
    check_input(*this, ctx, h);
    return O::matmul(h, w_);
  }
  std::vector<Tensor> parameters() override { return {w_}; }
  void init(Rng& rng) override { fill_xavier_uniform(w_, d_in_, d_out_, rng); }

 private:
  Tensor w_;
};

}  // namespace

std::unique_ptr<CandidateOp> make_candidate_op(const std::string& name, int64_t d_in,
                                               int64_t d_out) {
  if (d_in < 1 || d_out < 1)
    throw std::invalid_argument("candidate op dims must be >= 1");
  if (name == "gcn") return std::make_unique<GcnOp>(d_in, d_out);
  if (name == "gin") return std::make_unique<GinOp>(d_in, d_out);
  if (name == "sage_mean") return std::make_unique<SageMeanOp>(d_in, d_out);
  if (name == "graphconv") return std::make_unique<GraphConvOp>(d_in, d_out);
  if (name == "linear") return std::make_unique<LinearOp>(d_in, d_out);
  throw std::invalid_argument("unknown candidate op: " + name);
}

const std::vector<std::string>& default_op_names() {
  static const std::vector<std::string> names{"gcn", "gin", "sage_mean", "graphconv", "linear"};
  return names;
}

OperationSet::OperationSet(const std::vector<std::string>& names, int64_t d_in, int64_t d_out) {
  if (names.empty()) throw std::invalid_argument("operation set must name at least one op");
  for (const auto& n : names) ops_.push_back(make_candidate_op(n, d_in, d_out));
}

std::vector<std::string> OperationSet::names() const {
  std::vector<std::string> out;
  for (const auto& op : ops_) out.push_back(op->name());
  return out;
}

std::vector<Tensor> OperationSet::apply_all(const GraphContext& ctx, const Tensor& h) const {
  std::vector<Tensor> mapped;
  mapped.reserve(ops_.size());
  for (const auto& op : ops_) {
    mapped.push_back(op->apply(ctx, h));
    ++eval_count_;
  }
  return mapped;
}

std::vector<Tensor> OperationSet::parameters() {
  std::vector<Tensor> out;
  for (auto& op : ops_)
    for (auto& p : op->parameters()) out.push_back(p);
  return out;
}

int64_t OperationSet::param_count() {
  int64_t total = 0;
  for (auto& op : ops_) total += op->param_count();
  return total;
}

void OperationSet::init(Rng& rng) {
  for (auto& op : ops_) op->init(rng);
}

}  // namespace mnnas
