// SPDX-License-Identifier: Apache-2.0
#include "mnnas/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "mnnas/kernels.hpp"
#include "mnnas/rng.hpp"

namespace mnnas {

namespace {

std::string shape_str(const std::vector<int64_t>& s) {
  std::string out = "(";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

int64_t shape_numel(const std::vector<int64_t>& shape, const char* who) {
  if (shape.empty() || shape.size() > 2)
    throw std::invalid_argument(std::string(who) + ": shapes must be 1-D or 2-D");
  int64_t n = 1;
  for (int64_t d : shape) {
    if (d < 0) throw std::invalid_argument(std::string(who) + ": negative dimension");
    n *= d;
  }
  return n;
}

std::shared_ptr<TensorNode> make_node(std::vector<int64_t> shape, std::string op,
                                      std::vector<std::shared_ptr<TensorNode>> inputs) {
  auto n = std::make_shared<TensorNode>();
  const int64_t count = shape_numel(shape, op.c_str());
  n->shape = std::move(shape);
  n->value.assign(static_cast<size_t>(count), 0.0);
  n->op = std::move(op);
  for (const auto& in : inputs) n->requires_grad = n->requires_grad || in->requires_grad;
  if (n->requires_grad) n->grad.assign(static_cast<size_t>(count), 0.0);
  n->inputs = std::move(inputs);
  return n;
}

void check_defined(const Tensor& t, const char* who) {
  if (!t.defined()) throw std::invalid_argument(std::string(who) + ": undefined tensor");
}

void require_2d(const Tensor& t, const char* who) {
  check_defined(t, who);
  if (t.shape().size() != 2)
    throw std::invalid_argument(std::string(who) + ": expected 2-D tensor, got " +
                                shape_str(t.shape()));
}

[[noreturn]] void shape_error(const char* who, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(who) + ": incompatible shapes " + shape_str(a.shape()) +
                              " and " + shape_str(b.shape()));
}

}  // namespace

Tensor Tensor::zeros(std::vector<int64_t> shape, bool requires_grad) {
  auto n = make_node(std::move(shape), "", {});
  n->requires_grad = requires_grad;
  if (requires_grad) n->grad.assign(n->value.size(), 0.0);
  return Tensor(std::move(n));
}

Tensor Tensor::full(std::vector<int64_t> shape, double fill, bool requires_grad) {
  Tensor t = zeros(std::move(shape), requires_grad);
  std::fill(t.node()->value.begin(), t.node()->value.end(), fill);
  return t;
}

Tensor Tensor::scalar(double v, bool requires_grad) { return full({1}, v, requires_grad); }

Tensor Tensor::from_values(std::vector<int64_t> shape, std::vector<double> values,
                           bool requires_grad) {
  const int64_t count = shape_numel(shape, "from_values");
  if (count != static_cast<int64_t>(values.size()))
    throw std::invalid_argument("from_values: got " + std::to_string(values.size()) +
                                " values for shape " + shape_str(shape));
  Tensor t = zeros(std::move(shape), requires_grad);
  t.node()->value = std::move(values);
  return t;
}

double Tensor::item() const {
  check_defined(*this, "item");
  if (numel() != 1) throw std::invalid_argument("item: tensor has " + std::to_string(numel()) +
                                                " elements");
  return node_->value[0];
}

void Tensor::zero_grad() {
  check_defined(*this, "zero_grad");
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

void backward(const Tensor& loss) {
  check_defined(loss, "backward");
  TensorNode* root = loss.node().get();
  if (root->numel() != 1) throw std::invalid_argument("backward: loss must be a scalar");
  if (!root->requires_grad) return;  // nothing on the tape depends on parameters

  // Iterative post-order over nodes that require grad; children land before
  // parents, so the reversed order visits each node after all its consumers.
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> seen{root};
  struct Frame {
    TensorNode* n;
    size_t next;
  };
  std::vector<Frame> stack{{root, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < f.n->inputs.size()) {
      TensorNode* child = f.n->inputs[f.next++].get();
      if (child->requires_grad && seen.insert(child).second) stack.push_back({child, 0});
    } else {
      order.push_back(f.n);
      stack.pop_back();
    }
  }
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backward_fn) (*it)->backward_fn(**it);
}

namespace ops {

namespace {

template <class F, class D>
Tensor unary_map(const Tensor& a, const char* name, F f, D dfdx) {
  check_defined(a, name);
  auto node = make_node(a.shape(), name, {a.node()});
  const double* x = a.node()->value.data();
  double* y = node->value.data();
  kernels::for_each_index(node->numel(), [&](int64_t i) { y[i] = f(x[i]); });
  if (node->requires_grad) {
    node->backward_fn = [dfdx](TensorNode& self) {
      TensorNode& in = *self.inputs[0];
      const double* x = in.value.data();
      const double* y = self.value.data();
      const double* g = self.grad.data();
      double* gx = in.grad.data();
      kernels::for_each_index(self.numel(), [&](int64_t i) { gx[i] += dfdx(x[i], y[i]) * g[i]; });
    };
  }
  return Tensor(std::move(node));
}

bool is_scalar(const Tensor& t) { return t.numel() == 1; }

bool is_row_broadcast(const Tensor& a, const Tensor& b) {
  // b is one row applied over every row of 2-D a
  if (a.shape().size() != 2 || is_scalar(b)) return false;
  const auto& bs = b.shape();
  const int64_t m = a.shape()[1];
  return (bs.size() == 1 && bs[0] == m) || (bs.size() == 2 && bs[0] == 1 && bs[1] == m);
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_2d(a, "matmul");
  require_2d(b, "matmul");
  if (a.shape()[1] != b.shape()[0]) shape_error("matmul", a, b);
  const int64_t n = a.shape()[0], k = a.shape()[1], m = b.shape()[1];
  auto node = make_node({n, m}, "matmul", {a.node(), b.node()});
  kernels::matmul_nn(a.values().data(), b.values().data(), node->value.data(), n, k, m, false);
  if (node->requires_grad) {
    node->backward_fn = [n, k, m](TensorNode& self) {
      TensorNode& a = *self.inputs[0];
      TensorNode& b = *self.inputs[1];
      if (a.requires_grad)
        kernels::matmul_nt(self.grad.data(), b.value.data(), a.grad.data(), n, m, k, true);
      if (b.requires_grad)
        kernels::matmul_tn(a.value.data(), self.grad.data(), b.grad.data(), n, k, m, true);
    };
  }
  return Tensor(std::move(node));
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_defined(a, "add");
  check_defined(b, "add");
  if (a.shape() == b.shape()) {
    auto node = make_node(a.shape(), "add", {a.node(), b.node()});
    const double* xa = a.values().data();
    const double* xb = b.values().data();
    double* y = node->value.data();
    kernels::for_each_index(node->numel(), [&](int64_t i) { y[i] = xa[i] + xb[i]; });
    if (node->requires_grad) {
      node->backward_fn = [](TensorNode& self) {
        const double* g = self.grad.data();
        for (int s = 0; s < 2; ++s) {
          TensorNode& in = *self.inputs[s];
          if (!in.requires_grad) continue;
          double* gx = in.grad.data();
          kernels::for_each_index(self.numel(), [&](int64_t i) { gx[i] += g[i]; });
        }
      };
    }
    return Tensor(std::move(node));
  }
  if (is_scalar(b) || is_scalar(a)) {
    const Tensor& big = is_scalar(b) ? a : b;
    const Tensor& small = is_scalar(b) ? b : a;
    auto node = make_node(big.shape(), "add", {big.node(), small.node()});
    const double* x = big.values().data();
    const double s = small.values()[0];
    double* y = node->value.data();
    kernels::for_each_index(node->numel(), [&](int64_t i) { y[i] = x[i] + s; });
    if (node->requires_grad) {
      node->backward_fn = [](TensorNode& self) {
        TensorNode& big = *self.inputs[0];
        TensorNode& small = *self.inputs[1];
        const double* g = self.grad.data();
        if (big.requires_grad) {
          double* gx = big.grad.data();
          kernels::for_each_index(self.numel(), [&](int64_t i) { gx[i] += g[i]; });
        }
        if (small.requires_grad) {
          double acc = 0.0;
          for (int64_t i = 0; i < self.numel(); ++i) acc += g[i];
          small.grad[0] += acc;
        }
      };
    }
    return Tensor(std::move(node));
  }
  if (is_row_broadcast(a, b)) {
    const int64_t n = a.shape()[0], m = a.shape()[1];
    auto node = make_node({n, m}, "add", {a.node(), b.node()});
    const double* xa = a.values().data();
    const double* xb = b.values().data();
    double* y = node->value.data();
    kernels::for_each_index(n * m, [&](int64_t i) { y[i] = xa[i] + xb[i % m]; });
    if (node->requires_grad) {
      node->backward_fn = [n, m](TensorNode& self) {
        TensorNode& a = *self.inputs[0];
        TensorNode& b = *self.inputs[1];
        const double* g = self.grad.data();
        if (a.requires_grad) {
          double* gx = a.grad.data();
          kernels::for_each_index(n * m, [&](int64_t i) { gx[i] += g[i]; });
        }
        if (b.requires_grad) kernels::col_sums(g, n, m, b.grad.data(), true);
      };
    }
    return Tensor(std::move(node));
  }
  shape_error("add", a, b);
}

Tensor sub(const Tensor& a, const Tensor& b) { return add(a, scalar_mul(b, -1.0)); }

Tensor mul(const Tensor& a, const Tensor& b) {
  check_defined(a, "mul");
  check_defined(b, "mul");
  if (a.shape() == b.shape()) {
    auto node = make_node(a.shape(), "mul", {a.node(), b.node()});
    const double* xa = a.values().data();
    const double* xb = b.values().data();
    double* y = node->value.data();
    kernels::for_each_index(node->numel(), [&](int64_t i) { y[i] = xa[i] * xb[i]; });
    if (node->requires_grad) {
      node->backward_fn = [](TensorNode& self) {
        TensorNode& a = *self.inputs[0];
        TensorNode& b = *self.inputs[1];
        const double* g = self.grad.data();
        if (a.requires_grad) {
          double* gx = a.grad.data();
          const double* xb = b.value.data();
          kernels::for_each_index(self.numel(), [&](int64_t i) { gx[i] += xb[i] * g[i]; });
        }
        if (b.requires_grad) {
          double* gx = b.grad.data();
          const double* xa = a.value.data();
          kernels::for_each_index(self.numel(), [&](int64_t i) { gx[i] += xa[i] * g[i]; });
        }
      };
    }
    return Tensor(std::move(node));
  }
  if (is_scalar(a) || is_scalar(b)) {
    const Tensor& big = is_scalar(b) ? a : b;
    const Tensor& small = is_scalar(b) ? b : a;
    auto node = make_node(big.shape(), "mul", {big.node(), small.node()});
    const double* x = big.values().data();
    const double s = small.values()[0];
    double* y = node->value.data();
    kernels::for_each_index(node->numel(), [&](int64_t i) { y[i] = x[i] * s; });
    if (node->requires_grad) {
      node->backward_fn = [](TensorNode& self) {
        TensorNode& big = *self.inputs[0];
        TensorNode& small = *self.inputs[1];
        const double* g = self.grad.data();
        const double s = small.value[0];
        if (big.requires_grad) {
          double* gx = big.grad.data();
          kernels::for_each_index(self.numel(), [&](int64_t i) { gx[i] += s * g[i]; });
        }
        if (small.requires_grad) {
          double acc = 0.0;
          const double* x = big.value.data();
          for (int64_t i = 0; i < self.numel(); ++i) acc += x[i] * g[i];
          small.grad[0] += acc;
        }
      };
    }
    return Tensor(std::move(node));
  }
  shape_error("mul", a, b);
}

Tensor div(const Tensor& a, const Tensor& b) {
  check_defined(a, "div");
  check_defined(b, "div");
  if (a.shape() == b.shape()) {
    auto node = make_node(a.shape(), "div", {a.node(), b.node()});
    const double* xa = a.values().data();
    const double* xb = b.values().data();
    double* y = node->value.data();
    kernels::for_each_index(node->numel(), [&](int64_t i) { y[i] = xa[i] / xb[i]; });
    if (node->requires_grad) {
      node->backward_fn = [](TensorNode& self) {
        TensorNode& a = *self.inputs[0];
        TensorNode& b = *self.inputs[1];
        const double* g = self.grad.data();
        const double* xb = b.value.data();
        const double* y = self.value.data();
        if (a.requires_grad) {
          double* gx = a.grad.data();
          kernels::for_each_index(self.numel(), [&](int64_t i) { gx[i] += g[i] / xb[i]; });
        }
        if (b.requires_grad) {
          double* gx = b.grad.data();
          kernels::for_each_index(self.numel(), [&](int64_t i) { gx[i] -= g[i] * y[i] / xb[i]; });
        }
      };
    }
    return Tensor(std::move(node));
  }
  if (is_scalar(b)) {
    auto node = make_node(a.shape(), "div", {a.node(), b.node()});
    const double* x = a.values().data();
    const double s = b.values()[0];
    double* y = node->value.data();
    kernels::for_each_index(node->numel(), [&](int64_t i) { y[i] = x[i] / s; });
    if (node->requires_grad) {
      node->backward_fn = [](TensorNode& self) {
        TensorNode& a = *self.inputs[0];
        TensorNode& b = *self.inputs[1];
        const double* g = self.grad.data();
        const double s = b.value[0];
        if (a.requires_grad) {
          double* gx = a.grad.data();
          kernels::for_each_index(self.numel(), [&](int64_t i) { gx[i] += g[i] / s; });
        }
        if (b.requires_grad) {
          double acc = 0.0;
          const double* y = self.value.data();
          for (int64_t i = 0; i < self.numel(); ++i) acc += g[i] * y[i];
          b.grad[0] -= acc / s;
        }
      };
    }
    return Tensor(std::move(node));
  }
  shape_error("div", a, b);
}

Tensor scalar_mul(const Tensor& a, double c) {
  return unary_map(
      a, "scalar_mul", [c](double x) { return c * x; },
      [c](double, double) { return c; });
}

Tensor add_scalar(const Tensor& a, double c) {
  return unary_map(
      a, "add_scalar", [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Tensor relu(const Tensor& a) {
  return unary_map(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
  return unary_map(
      a, "sigmoid",
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
  return unary_map(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor exp(const Tensor& a) {
  return unary_map(
      a, "exp", [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  return unary_map(
      a, "log", [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor sqrt(const Tensor& a) {
  return unary_map(
      a, "sqrt", [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / y; });
}

Tensor clamp_min(const Tensor& a, double floor) {
  return unary_map(
      a, "clamp_min", [floor](double x) { return x > floor ? x : floor; },
      [floor](double x, double) { return x > floor ? 1.0 : 0.0; });
}

Tensor softmax_rows(const Tensor& a) {
  require_2d(a, "softmax_rows");
  const int64_t n = a.shape()[0], m = a.shape()[1];
  if (m < 1) throw std::invalid_argument("softmax_rows: empty rows");
  auto node = make_node({n, m}, "softmax_rows", {a.node()});
  kernels::softmax_rows(a.values().data(), n, m, node->value.data());
  if (node->requires_grad) {
    node->backward_fn = [n, m](TensorNode& self) {
      TensorNode& in = *self.inputs[0];
      kernels::softmax_rows_backward(self.value.data(), self.grad.data(), n, m, in.grad.data());
    };
  }
  return Tensor(std::move(node));
}

Tensor sum(const Tensor& a, int axis) {
  require_2d(a, "sum");
  if (axis != 0 && axis != 1) throw std::invalid_argument("sum: axis must be 0 or 1");
  const int64_t n = a.shape()[0], m = a.shape()[1];
  if (axis == 0) {
    auto node = make_node({1, m}, "sum", {a.node()});
    kernels::col_sums(a.values().data(), n, m, node->value.data(), false);
    if (node->requires_grad) {
      node->backward_fn = [n, m](TensorNode& self) {
        TensorNode& in = *self.inputs[0];
        const double* g = self.grad.data();
        double* gx = in.grad.data();
        kernels::for_each_index(n * m, [&](int64_t i) { gx[i] += g[i % m]; });
      };
    }
    return Tensor(std::move(node));
  }
  auto node = make_node({n, 1}, "sum", {a.node()});
  kernels::row_sums(a.values().data(), n, m, node->value.data(), false);
  if (node->requires_grad) {
    node->backward_fn = [n, m](TensorNode& self) {
      TensorNode& in = *self.inputs[0];
      const double* g = self.grad.data();
      double* gx = in.grad.data();
      kernels::for_each_index(n * m, [&](int64_t i) { gx[i] += g[i / m]; });
    };
  }
  return Tensor(std::move(node));
}

Tensor mean(const Tensor& a, int axis) {
  require_2d(a, "mean");
  const int64_t denom = axis == 0 ? a.shape()[0] : a.shape()[1];
  if (denom == 0) throw std::invalid_argument("mean: reduction over empty axis");
  return scalar_mul(sum(a, axis), 1.0 / static_cast<double>(denom));
}

Tensor sum_all(const Tensor& a) {
  check_defined(a, "sum_all");
  auto node = make_node({1}, "sum_all", {a.node()});
  double acc = 0.0;
  const double* x = a.values().data();
  for (int64_t i = 0; i < a.numel(); ++i) acc += x[i];
  node->value[0] = acc;
  if (node->requires_grad) {
    node->backward_fn = [](TensorNode& self) {
      TensorNode& in = *self.inputs[0];
      const double g = self.grad[0];
      double* gx = in.grad.data();
      kernels::for_each_index(in.numel(), [&](int64_t i) { gx[i] += g; });
    };
  }
  return Tensor(std::move(node));
}

Tensor mean_all(const Tensor& a) {
  check_defined(a, "mean_all");
  if (a.numel() == 0) throw std::invalid_argument("mean_all: empty tensor");
  return scalar_mul(sum_all(a), 1.0 / static_cast<double>(a.numel()));
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  std::vector<std::shared_ptr<TensorNode>> inputs;
  std::vector<int64_t> widths;
  const int64_t n = parts[0].rows();
  int64_t total = 0;
  for (const auto& p : parts) {
    check_defined(p, "concat_cols");
    if (p.rows() != n)
      throw std::invalid_argument("concat_cols: row counts differ (" + std::to_string(n) +
                                  " vs " + std::to_string(p.rows()) + ")");
    inputs.push_back(p.node());
    widths.push_back(p.cols());
    total += p.cols();
  }
  auto node = make_node({n, total}, "concat_cols", std::move(inputs));
  double* y = node->value.data();
  int64_t off = 0;
  for (size_t k = 0; k < parts.size(); ++k) {
    const double* x = parts[k].values().data();
    const int64_t w = widths[k];
    kernels::for_each_index(n * w, [&, off, w](int64_t i) {
      y[(i / w) * total + off + (i % w)] = x[i];
    });
    off += w;
  }
  if (node->requires_grad) {
    node->backward_fn = [n, total, widths](TensorNode& self) {
      const double* g = self.grad.data();
      int64_t off = 0;
      for (size_t k = 0; k < self.inputs.size(); ++k) {
        TensorNode& in = *self.inputs[k];
        const int64_t w = widths[k];
        if (in.requires_grad) {
          double* gx = in.grad.data();
          kernels::for_each_index(n * w, [&, off, w](int64_t i) {
            gx[i] += g[(i / w) * total + off + (i % w)];
          });
        }
        off += w;
      }
    };
  }
  return Tensor(std::move(node));
}

Tensor col_slice(const Tensor& a, int64_t col) {
  require_2d(a, "col_slice");
  const int64_t n = a.shape()[0], m = a.shape()[1];
  if (col < 0 || col >= m)
    throw std::invalid_argument("col_slice: column " + std::to_string(col) +
                                " out of range for " + shape_str(a.shape()));
  auto node = make_node({n, 1}, "col_slice", {a.node()});
  const double* x = a.values().data();
  double* y = node->value.data();
  kernels::for_each_index(n, [&](int64_t i) { y[i] = x[i * m + col]; });
  if (node->requires_grad) {
    node->backward_fn = [m, col](TensorNode& self) {
      TensorNode& in = *self.inputs[0];
      const double* g = self.grad.data();
      double* gx = in.grad.data();
      kernels::for_each_index(self.numel(), [&](int64_t i) { gx[i * m + col] += g[i]; });
    };
  }
  return Tensor(std::move(node));
}

Tensor row_gather(const Tensor& a, std::vector<int64_t> idx) {
  require_2d(a, "row_gather");
  const int64_t n = a.shape()[0], m = a.shape()[1];
  for (int64_t i : idx)
    if (i < 0 || i >= n)
      throw std::invalid_argument("row_gather: index " + std::to_string(i) +
                                  " out of range for " + std::to_string(n) + " rows");
  const int64_t count = static_cast<int64_t>(idx.size());
  auto node = make_node({count, m}, "row_gather", {a.node()});
  kernels::gather_rows(a.values().data(), idx.data(), count, m, node->value.data(), false);
  if (node->requires_grad) {
    // Scatter-add of output-row grads back onto source rows, grouped so the
    // accumulation order per source row is fixed.
    auto seg = std::make_shared<kernels::SegmentIndex>(
        kernels::build_segment_index(idx.data(), count, n));
    node->backward_fn = [seg, m](TensorNode& self) {
      TensorNode& in = *self.inputs[0];
      kernels::segment_sum_rows(self.grad.data(), *seg, m, in.grad.data(), true);
    };
  }
  return Tensor(std::move(node));
}

Tensor segment_sum(const Tensor& a, std::vector<int64_t> ids, int64_t num_segments) {
  require_2d(a, "segment_sum");
  const int64_t n = a.shape()[0], m = a.shape()[1];
  if (static_cast<int64_t>(ids.size()) != n)
    throw std::invalid_argument("segment_sum: got " + std::to_string(ids.size()) +
                                " segment ids for " + std::to_string(n) + " rows");
  auto seg = std::make_shared<kernels::SegmentIndex>(
      kernels::build_segment_index(ids.data(), n, num_segments));
  auto node = make_node({num_segments, m}, "segment_sum", {a.node()});
  kernels::segment_sum_rows(a.values().data(), *seg, m, node->value.data(), false);
  if (node->requires_grad) {
    auto ids_ptr = std::make_shared<std::vector<int64_t>>(std::move(ids));
    node->backward_fn = [ids_ptr, n, m](TensorNode& self) {
      TensorNode& in = *self.inputs[0];
      kernels::gather_rows(self.grad.data(), ids_ptr->data(), n, m, in.grad.data(), true);
    };
  }
  return Tensor(std::move(node));
}

Tensor scale_rows(const Tensor& a, const Tensor& coeff) {
  require_2d(a, "scale_rows");
  check_defined(coeff, "scale_rows");
  const int64_t n = a.shape()[0], m = a.shape()[1];
  if (coeff.numel() != n || coeff.cols() != 1) shape_error("scale_rows", a, coeff);
  auto node = make_node({n, m}, "scale_rows", {a.node(), coeff.node()});
  kernels::scale_rows(a.values().data(), coeff.values().data(), n, m, node->value.data(), false);
  if (node->requires_grad) {
    node->backward_fn = [n, m](TensorNode& self) {
      TensorNode& a = *self.inputs[0];
      TensorNode& c = *self.inputs[1];
      if (a.requires_grad)
        kernels::scale_rows(self.grad.data(), c.value.data(), n, m, a.grad.data(), true);
      if (c.requires_grad)
        kernels::row_dots(a.value.data(), self.grad.data(), n, m, c.grad.data(), true);
    };
  }
  return Tensor(std::move(node));
}

}  // namespace ops

void fill_xavier_uniform(Tensor& t, int64_t fan_in, int64_t fan_out, Rng& rng) {
  if (fan_in + fan_out <= 0) throw std::invalid_argument("fill_xavier_uniform: bad fan sizes");
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.mutable_values()) v = rng.uniform(-bound, bound);
}

}  // namespace mnnas
