// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "mnnas/tensor.hpp"

namespace mnnas {

struct GradCheckReport {
  double max_rel_err = 0.0;
  size_t worst_param = 0;   // index into the params list
  int64_t worst_index = 0;  // flat element index within that parameter
};

// Compares reverse-mode gradients of rebuild() against central finite
// differences, perturbing each parameter element in place. rebuild() must be
// a pure function of the parameter values (no RNG, no hidden state) and
// return a scalar loss. Relative error per element is
// |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
GradCheckReport gradcheck(const std::function<Tensor()>& rebuild, std::vector<Tensor> params,
                          double step = 1e-3);

}  // namespace mnnas
