// SPDX-License-Identifier: Apache-2.0
#include "mnnas/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mnnas::kernels {

namespace {
std::atomic<Backend> g_backend{Backend::kAuto};
// Below this many element-updates the fork/join overhead dominates.
constexpr int64_t kAutoWorkThreshold = 1 << 15;
}  // namespace

void set_backend(Backend b) { g_backend.store(b); }
Backend backend() { return g_backend.load(); }

bool parallel_for_work(int64_t work) {
  switch (g_backend.load()) {
    case Backend::kSerial: return false;
    case Backend::kOpenMP: return true;
    case Backend::kAuto: return work >= kAutoWorkThreshold && omp_get_max_threads() > 1;
  }
  return false;
}

SegmentIndex build_segment_index(const int64_t* ids, int64_t count, int64_t num_segments) {
  if (num_segments < 0) throw std::invalid_argument("build_segment_index: negative segment count");
  SegmentIndex seg;
  seg.offsets.assign(static_cast<size_t>(num_segments) + 1, 0);
  for (int64_t e = 0; e < count; ++e) {
    if (ids[e] < 0 || ids[e] >= num_segments)
      throw std::invalid_argument("build_segment_index: segment id out of range");
    ++seg.offsets[static_cast<size_t>(ids[e]) + 1];
  }
  std::partial_sum(seg.offsets.begin(), seg.offsets.end(), seg.offsets.begin());
  seg.order.resize(static_cast<size_t>(count));
  std::vector<int64_t> cursor(seg.offsets.begin(), seg.offsets.end() - 1);
  for (int64_t e = 0; e < count; ++e) seg.order[static_cast<size_t>(cursor[static_cast<size_t>(ids[e])]++)] = e;
  return seg;
}

// Per-output-row bodies shared by both backends. Each touches a single output
// row with a fixed accumulation order, which is what makes the serial and
// OpenMP paths bit-identical.
namespace detail {

inline void matmul_nn_row(const double* a, const double* b, double* c, int64_t i, int64_t k,
                          int64_t m, bool accumulate) {
  double* crow = c + i * m;
  if (!accumulate) std::fill(crow, crow + m, 0.0);
  const double* arow = a + i * k;
  for (int64_t t = 0; t < k; ++t) {
    const double av = arow[t];
    const double* brow = b + t * m;
    for (int64_t j = 0; j < m; ++j) crow[j] += av * brow[j];
  }
}

inline void matmul_nt_row(const double* a, const double* b, double* c, int64_t i, int64_t m,
                          int64_t k, bool accumulate) {
  double* crow = c + i * k;
  const double* arow = a + i * m;
  for (int64_t j = 0; j < k; ++j) {
    double acc = 0.0;
    const double* brow = b + j * m;
    for (int64_t t = 0; t < m; ++t) acc += arow[t] * brow[t];
    crow[j] = accumulate ? crow[j] + acc : acc;
  }
}

inline void matmul_tn_row(const double* a, const double* b, double* c, int64_t i, int64_t n,
                          int64_t k, int64_t m, bool accumulate) {
  double* crow = c + i * m;
  if (!accumulate) std::fill(crow, crow + m, 0.0);
  for (int64_t t = 0; t < n; ++t) {
    const double av = a[t * k + i];
    const double* brow = b + t * m;
    for (int64_t j = 0; j < m; ++j) crow[j] += av * brow[j];
  }
}

inline void gather_row(const double* src, const int64_t* idx, int64_t r, int64_t width,
                       double* dst, bool accumulate) {
  const double* s = src + idx[r] * width;
  double* d = dst + r * width;
  if (accumulate) {
    for (int64_t j = 0; j < width; ++j) d[j] += s[j];
  } else {
    std::copy(s, s + width, d);
  }
}

inline void segment_sum_row(const double* src, const SegmentIndex& seg, int64_t s, int64_t width,
                            double* dst, bool accumulate) {
  double* d = dst + s * width;
  if (!accumulate) std::fill(d, d + width, 0.0);
  for (int64_t p = seg.offsets[static_cast<size_t>(s)]; p < seg.offsets[static_cast<size_t>(s) + 1]; ++p) {
    const double* row = src + seg.order[static_cast<size_t>(p)] * width;
    for (int64_t j = 0; j < width; ++j) d[j] += row[j];
  }
}

inline void scale_row(const double* x, const double* coeff, int64_t i, int64_t width, double* y,
                      bool accumulate) {
  const double c = coeff[i];
  const double* xr = x + i * width;
  double* yr = y + i * width;
  if (accumulate) {
    for (int64_t j = 0; j < width; ++j) yr[j] += c * xr[j];
  } else {
    for (int64_t j = 0; j < width; ++j) yr[j] = c * xr[j];
  }
}

inline void row_dot(const double* a, const double* b, int64_t i, int64_t width, double* out,
                    bool accumulate) {
  const double* ar = a + i * width;
  const double* br = b + i * width;
  double acc = 0.0;
  for (int64_t j = 0; j < width; ++j) acc += ar[j] * br[j];
  out[i] = accumulate ? out[i] + acc : acc;
}

inline void row_sum(const double* x, int64_t i, int64_t width, double* out, bool accumulate) {
  const double* xr = x + i * width;
  double acc = 0.0;
  for (int64_t j = 0; j < width; ++j) acc += xr[j];
  out[i] = accumulate ? out[i] + acc : acc;
}

inline void col_sum(const double* x, int64_t rows, int64_t width, int64_t j, double* out,
                    bool accumulate) {
  double acc = 0.0;
  for (int64_t i = 0; i < rows; ++i) acc += x[i * width + j];
  out[j] = accumulate ? out[j] + acc : acc;
}

inline void softmax_row(const double* x, int64_t i, int64_t width, double* y) {
  const double* xr = x + i * width;
  double* yr = y + i * width;
  double mx = xr[0];
  for (int64_t j = 1; j < width; ++j) mx = std::max(mx, xr[j]);
  double sum = 0.0;
  for (int64_t j = 0; j < width; ++j) {
    yr[j] = std::exp(xr[j] - mx);
    sum += yr[j];
  }
  for (int64_t j = 0; j < width; ++j) yr[j] /= sum;
}

inline void softmax_row_backward(const double* y, const double* gy, int64_t i, int64_t width,
                                 double* gx_acc) {
  const double* yr = y + i * width;
  const double* gr = gy + i * width;
  double* out = gx_acc + i * width;
  double dot = 0.0;
  for (int64_t j = 0; j < width; ++j) dot += gr[j] * yr[j];
  for (int64_t j = 0; j < width; ++j) out[j] += yr[j] * (gr[j] - dot);
}

}  // namespace detail

// clang-format off
#define MNNAS_KERNEL_BODIES(LOOP)                                                              \
  void matmul_nn(const double* a, const double* b, double* c, int64_t n, int64_t k, int64_t m, \
                 bool accumulate) {                                                            \
    LOOP for (int64_t i = 0; i < n; ++i) detail::matmul_nn_row(a, b, c, i, k, m, accumulate);  \
  }                                                                                            \
  void matmul_nt(const double* a, const double* b, double* c, int64_t n, int64_t m, int64_t k, \
                 bool accumulate) {                                                            \
    LOOP for (int64_t i = 0; i < n; ++i) detail::matmul_nt_row(a, b, c, i, m, k, accumulate);  \
  }                                                                                            \
  void matmul_tn(const double* a, const double* b, double* c, int64_t n, int64_t k, int64_t m, \
                 bool accumulate) {                                                            \
    LOOP for (int64_t i = 0; i < k; ++i) detail::matmul_tn_row(a, b, c, i, n, k, m, accumulate); \
  }                                                                                            \
  void gather_rows(const double* src, const int64_t* idx, int64_t count, int64_t width,        \
                   double* dst, bool accumulate) {                                             \
    LOOP for (int64_t r = 0; r < count; ++r) detail::gather_row(src, idx, r, width, dst, accumulate); \
  }                                                                                            \
  void segment_sum_rows(const double* src, const SegmentIndex& seg, int64_t width, double* dst,\
                        bool accumulate) {                                                     \
    const int64_t segments = static_cast<int64_t>(seg.offsets.size()) - 1;                     \
    LOOP for (int64_t s = 0; s < segments; ++s)                                                \
        detail::segment_sum_row(src, seg, s, width, dst, accumulate);                          \
  }                                                                                            \
  void scale_rows(const double* x, const double* coeff, int64_t rows, int64_t width,           \
                  double* y, bool accumulate) {                                                \
    LOOP for (int64_t i = 0; i < rows; ++i) detail::scale_row(x, coeff, i, width, y, accumulate); \
  }                                                                                            \
  void row_dots(const double* a, const double* b, int64_t rows, int64_t width, double* out,    \
                bool accumulate) {                                                             \
    LOOP for (int64_t i = 0; i < rows; ++i) detail::row_dot(a, b, i, width, out, accumulate);  \
  }                                                                                            \
  void row_sums(const double* x, int64_t rows, int64_t width, double* out, bool accumulate) {  \
    LOOP for (int64_t i = 0; i < rows; ++i) detail::row_sum(x, i, width, out, accumulate);     \
  }                                                                                            \
  void col_sums(const double* x, int64_t rows, int64_t width, double* out, bool accumulate) {  \
    LOOP for (int64_t j = 0; j < width; ++j) detail::col_sum(x, rows, width, j, out, accumulate); \
  }                                                                                            \
  void softmax_rows(const double* x, int64_t rows, int64_t width, double* y) {                 \
    LOOP for (int64_t i = 0; i < rows; ++i) detail::softmax_row(x, i, width, y);               \
  }                                                                                            \
  void softmax_rows_backward(const double* y, const double* gy, int64_t rows, int64_t width,   \
                             double* gx_acc) {                                                 \
    LOOP for (int64_t i = 0; i < rows; ++i)                                                    \
        detail::softmax_row_backward(y, gy, i, width, gx_acc);                                 \
  }
// clang-format on

namespace serial {
#define MNNAS_NO_PRAGMA
MNNAS_KERNEL_BODIES(MNNAS_NO_PRAGMA)
#undef MNNAS_NO_PRAGMA
}  // namespace serial

namespace openmp {
#define MNNAS_OMP_FOR _Pragma("omp parallel for schedule(static)")
MNNAS_KERNEL_BODIES(MNNAS_OMP_FOR)
#undef MNNAS_OMP_FOR
}  // namespace openmp

#undef MNNAS_KERNEL_BODIES

namespace {
inline bool par(int64_t work) { return parallel_for_work(work); }
}  // namespace

void matmul_nn(const double* a, const double* b, double* c, int64_t n, int64_t k, int64_t m,
               bool accumulate) {
  par(n * k * m) ? openmp::matmul_nn(a, b, c, n, k, m, accumulate)
                 : serial::matmul_nn(a, b, c, n, k, m, accumulate);
}
void matmul_nt(const double* a, const double* b, double* c, int64_t n, int64_t m, int64_t k,
               bool accumulate) {
  par(n * m * k) ? openmp::matmul_nt(a, b, c, n, m, k, accumulate)
                 : serial::matmul_nt(a, b, c, n, m, k, accumulate);
}
void matmul_tn(const double* a, const double* b, double* c, int64_t n, int64_t k, int64_t m,
               bool accumulate) {
  par(n * k * m) ? openmp::matmul_tn(a, b, c, n, k, m, accumulate)
                 : serial::matmul_tn(a, b, c, n, k, m, accumulate);
}
void gather_rows(const double* src, const int64_t* idx, int64_t count, int64_t width, double* dst,
                 bool accumulate) {
  par(count * width) ? openmp::gather_rows(src, idx, count, width, dst, accumulate)
                     : serial::gather_rows(src, idx, count, width, dst, accumulate);
}
void segment_sum_rows(const double* src, const SegmentIndex& seg, int64_t width, double* dst,
                      bool accumulate) {
  const int64_t work = static_cast<int64_t>(seg.order.size()) * width;
  par(work) ? openmp::segment_sum_rows(src, seg, width, dst, accumulate)
            : serial::segment_sum_rows(src, seg, width, dst, accumulate);
}
void scale_rows(const double* x, const double* coeff, int64_t rows, int64_t width, double* y,
                bool accumulate) {
  par(rows * width) ? openmp::scale_rows(x, coeff, rows, width, y, accumulate)
                    : serial::scale_rows(x, coeff, rows, width, y, accumulate);
}
void row_dots(const double* a, const double* b, int64_t rows, int64_t width, double* out,
              bool accumulate) {
  par(rows * width) ? openmp::row_dots(a, b, rows, width, out, accumulate)
                    : serial::row_dots(a, b, rows, width, out, accumulate);
}
void row_sums(const double* x, int64_t rows, int64_t width, double* out, bool accumulate) {
  par(rows * width) ? openmp::row_sums(x, rows, width, out, accumulate)
                    : serial::row_sums(x, rows, width, out, accumulate);
}
void col_sums(const double* x, int64_t rows, int64_t width, double* out, bool accumulate) {
  par(rows * width) ? openmp::col_sums(x, rows, width, out, accumulate)
                    : serial::col_sums(x, rows, width, out, accumulate);
}
void softmax_rows(const double* x, int64_t rows, int64_t width, double* y) {
  par(rows * width) ? openmp::softmax_rows(x, rows, width, y)
                    : serial::softmax_rows(x, rows, width, y);
}
void softmax_rows_backward(const double* y, const double* gy, int64_t rows, int64_t width,
                           double* gx_acc) {
  par(rows * width) ? openmp::softmax_rows_backward(y, gy, rows, width, gx_acc)
                    : serial::softmax_rows_backward(y, gy, rows, width, gx_acc);
}

}  // namespace mnnas::kernels
