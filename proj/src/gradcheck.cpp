// SPDX-License-Identifier: Apache-2.0
#include "mnnas/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace mnnas {

GradCheckReport gradcheck(const std::function<Tensor()>& rebuild, std::vector<Tensor> params,
                          double step) {
  if (step <= 0.0) throw std::invalid_argument("gradcheck: step must be positive");
  for (auto& p : params) {
    if (!p.defined() || !p.requires_grad())
      throw std::invalid_argument("gradcheck: params must require grad");
    p.zero_grad();
  }
  Tensor loss = rebuild();
  backward(loss);
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (auto& p : params) analytic.emplace_back(p.grad().begin(), p.grad().end());

  GradCheckReport report;
  for (size_t k = 0; k < params.size(); ++k) {
    auto vals = params[k].mutable_values();
    for (int64_t i = 0; i < params[k].numel(); ++i) {
      const double orig = vals[i];
      vals[i] = orig + step;
      const double f_plus = rebuild().item();
      vals[i] = orig - step;
      const double f_minus = rebuild().item();
      vals[i] = orig;
      const double numeric = (f_plus - f_minus) / (2.0 * step);
      const double a = analytic[k][static_cast<size_t>(i)];
      const double rel = std::fabs(a - numeric) / std::max(1e-8, std::fabs(a) + std::fabs(numeric));
      if (rel > report.max_rel_err) {
        report.max_rel_err = rel;
        report.worst_param = k;
        report.worst_index = i;
      }
    }
  }
  return report;
}

}  // namespace mnnas
