// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mnnas {

class Rng;

// Reverse-mode autodiff over dense row-major double matrices. Tensors are
// cheap handles onto shared nodes; every operation records its inputs and a
// backward closure, and backward() walks the recorded graph once.
//
// Shapes are 1-D (vectors, also used for scalars of size 1) or 2-D.

struct TensorNode {
  std::vector<int64_t> shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated iff requires_grad
  bool requires_grad = false;
  std::string op;  // empty for leaves
  std::vector<std::shared_ptr<TensorNode>> inputs;
  std::function<void(TensorNode&)> backward_fn;

  int64_t numel() const { return static_cast<int64_t>(value.size()); }
  int64_t rows() const { return shape[0]; }
  int64_t cols() const { return shape.size() == 2 ? shape[1] : 1; }
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}

  static Tensor zeros(std::vector<int64_t> shape, bool requires_grad = false);
  static Tensor full(std::vector<int64_t> shape, double fill, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);
  static Tensor from_values(std::vector<int64_t> shape, std::vector<double> values,
                            bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const std::shared_ptr<TensorNode>& node() const { return node_; }

  const std::vector<int64_t>& shape() const { return node_->shape; }
  int64_t numel() const { return node_->numel(); }
  int64_t rows() const { return node_->rows(); }
  int64_t cols() const { return node_->cols(); }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const double> values() const { return node_->value; }
  std::span<double> mutable_values() { return node_->value; }
  std::span<const double> grad() const { return node_->grad; }
  double item() const;
  double at(int64_t i, int64_t j) const { return node_->value[static_cast<size_t>(i * cols() + j)]; }

  void zero_grad();

 private:
  std::shared_ptr<TensorNode> node_;
};

// Runs reverse-mode accumulation from a scalar loss. Gradients add into the
// existing .grad buffers, so callers zero them between steps.
void backward(const Tensor& loss);

namespace ops {

Tensor matmul(const Tensor& a, const Tensor& b);             // (n,k)x(k,m)
Tensor add(const Tensor& a, const Tensor& b);                // same shape, row (1,m) or scalar b
Tensor sub(const Tensor& a, const Tensor& b);                // same broadcast rules as add
Tensor mul(const Tensor& a, const Tensor& b);                // same shape, or scalar either side
Tensor div(const Tensor& a, const Tensor& b);                // same shape, or scalar divisor
Tensor scalar_mul(const Tensor& a, double c);
Tensor add_scalar(const Tensor& a, double c);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor clamp_min(const Tensor& a, double floor);
Tensor softmax_rows(const Tensor& a);
Tensor sum(const Tensor& a, int axis);   // axis 0 -> (1,m); axis 1 -> (n,1)
Tensor mean(const Tensor& a, int axis);
Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor col_slice(const Tensor& a, int64_t col);              // (n,1) view-copy of one column
Tensor row_gather(const Tensor& a, std::vector<int64_t> idx);
Tensor segment_sum(const Tensor& a, std::vector<int64_t> ids, int64_t num_segments);
Tensor scale_rows(const Tensor& a, const Tensor& coeff);     // coeff (n) or (n,1)

}  // namespace ops

// Uniform(-b, b) with b = sqrt(6 / (fan_in + fan_out)).
void fill_xavier_uniform(Tensor& t, int64_t fan_in, int64_t fan_out, Rng& rng);

}  // namespace mnnas
