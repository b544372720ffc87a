// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace mnnas::kernels {

// Kernel backend. Serial and OpenMP paths share the same per-output-element
// loops (only the outer loop is parallelized), so they produce bit-identical
// results at any thread count; the unit tests assert this.
enum class Backend { kSerial, kOpenMP, kAuto };

void set_backend(Backend b);
Backend backend();

// True when the dispatcher would run `work` element-updates in parallel.
bool parallel_for_work(int64_t work);

// Stable grouping of entry ids by segment; entries keep ascending order
// within each segment so summation order is fixed.
struct SegmentIndex {
  std::vector<int64_t> offsets;  // size num_segments + 1
  std::vector<int64_t> order;    // entry ids grouped by segment
};

SegmentIndex build_segment_index(const int64_t* ids, int64_t count, int64_t num_segments);

// c[n x m] (+)= a[n x k] * b[k x m]
// c[n x k] (+)= a[n x m] * b[k x m]^T
// c[k x m] (+)= a[n x k]^T * b[n x m]
#define MNNAS_DECLARE_KERNELS                                                                  \
  void matmul_nn(const double* a, const double* b, double* c, int64_t n, int64_t k, int64_t m, \
                 bool accumulate);                                                             \
  void matmul_nt(const double* a, const double* b, double* c, int64_t n, int64_t m, int64_t k, \
                 bool accumulate);                                                             \
  void matmul_tn(const double* a, const double* b, double* c, int64_t n, int64_t k, int64_t m, \
                 bool accumulate);                                                             \
  void gather_rows(const double* src, const int64_t* idx, int64_t count, int64_t width,        \
                   double* dst, bool accumulate);                                              \
  void segment_sum_rows(const double* src, const SegmentIndex& seg, int64_t width, double* dst,\
                        bool accumulate);                                                      \
  void scale_rows(const double* x, const double* coeff, int64_t rows, int64_t width,           \
                  double* y, bool accumulate);                                                 \
  void row_dots(const double* a, const double* b, int64_t rows, int64_t width, double* out,    \
                bool accumulate);                                                              \
  void row_sums(const double* x, int64_t rows, int64_t width, double* out, bool accumulate);   \
  void col_sums(const double* x, int64_t rows, int64_t width, double* out, bool accumulate);   \
  void softmax_rows(const double* x, int64_t rows, int64_t width, double* y);                  \
  void softmax_rows_backward(const double* y, const double* gy, int64_t rows, int64_t width,   \
                             double* gx_acc);

namespace serial {
MNNAS_DECLARE_KERNELS
}
namespace openmp {
MNNAS_DECLARE_KERNELS
}
// Dispatching entry points: pick a backend from the configured mode and the
// work size, then forward to serial:: or openmp::.
MNNAS_DECLARE_KERNELS

#undef MNNAS_DECLARE_KERNELS

// Elementwise loop with the same dispatch policy. f(i) must write only
// element i of its outputs.
template <class F>
void for_each_index(int64_t n, F&& f) {
  if (parallel_for_work(n)) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) f(i);
  } else {
    for (int64_t i = 0; i < n; ++i) f(i);
  }
}

}  // namespace mnnas::kernels
