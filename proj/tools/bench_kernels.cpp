// SPDX-License-Identifier: Apache-2.0
// Times the serial kernels against their OpenMP counterparts on desk-scale
// shapes and reports the speedup per kernel, plus an end-to-end model
// forward+backward comparison. Both paths produce bit-identical results (the
// unit tests assert that); this tool only measures time.
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mnnas/graph.hpp"
#include "mnnas/kernels.hpp"
#include "mnnas/model.hpp"
#include "mnnas/rng.hpp"
#include "mnnas/synth.hpp"
#include "mnnas/tensor.hpp"
#include "mnnas/trainer.hpp"

namespace {

using namespace mnnas;
namespace k = mnnas::kernels;

std::vector<double> random_matrix(int64_t rows, int64_t cols, Rng& rng) {
  std::vector<double> v(static_cast<size_t>(rows * cols));
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// Best-of-reps wall time in milliseconds.
double time_best(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (ms < best) best = ms;
  }
  return best;
}

void report(const std::string& name, double serial_ms, double openmp_ms) {
  std::printf("%-24s %10.3f ms %10.3f ms %8.2fx\n", name.c_str(), serial_ms, openmp_ms,
              serial_ms / openmp_ms);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP kernel timings"};
  int64_t n = 4000;
  int64_t d = 64;
  int reps = 5;
  app.add_option("--n", n, "row count (graph nodes)");
  app.add_option("--d", d, "feature width");
  app.add_option("--reps", reps, "repetitions per measurement (best-of)");
  CLI11_PARSE(app, argc, argv);

  Rng rng(7);
  const std::vector<double> a = random_matrix(n, d, rng);
  const std::vector<double> b = random_matrix(d, d, rng);
  const std::vector<double> coeff = random_matrix(n, 1, rng);
  std::vector<double> out(static_cast<size_t>(n * d));
  std::vector<double> row_out(static_cast<size_t>(n));

  Graph g = [&] {
    Rng graph_rng(11);
    return generate_ba(n, 5, graph_rng);
  }();
  std::vector<int64_t> targets;
  targets.reserve(2 * g.edges().size());
  for (const Edge& e : g.edges()) {
    targets.push_back(e.u);
    targets.push_back(e.v);
  }
  const k::SegmentIndex seg =
      k::build_segment_index(targets.data(), static_cast<int64_t>(targets.size()), n);
  std::vector<double> gathered(targets.size() * static_cast<size_t>(d));

  std::printf("n = %lld, d = %lld, edges = %lld, reps = %d (best-of)\n",
              static_cast<long long>(n), static_cast<long long>(d),
              static_cast<long long>(g.num_edges()), reps);
  std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  report("matmul_nn",
         time_best(reps, [&] { k::serial::matmul_nn(a.data(), b.data(), out.data(), n, d, d, false); }),
         time_best(reps, [&] { k::openmp::matmul_nn(a.data(), b.data(), out.data(), n, d, d, false); }));
  report("matmul_nt",
         time_best(reps, [&] { k::serial::matmul_nt(a.data(), b.data(), out.data(), n, d, d, false); }),
         time_best(reps, [&] { k::openmp::matmul_nt(a.data(), b.data(), out.data(), n, d, d, false); }));
  report("matmul_tn",
         time_best(reps, [&] { k::serial::matmul_tn(a.data(), a.data(), out.data(), n, d, d, false); }),
         time_best(reps, [&] { k::openmp::matmul_tn(a.data(), a.data(), out.data(), n, d, d, false); }));
  {
    const auto count = static_cast<int64_t>(targets.size());
    report("gather_rows",
           time_best(reps, [&] {
             k::serial::gather_rows(a.data(), targets.data(), count, d, gathered.data(), false);
           }),
           time_best(reps, [&] {
             k::openmp::gather_rows(a.data(), targets.data(), count, d, gathered.data(), false);
           }));
  }
  report("segment_sum_rows",
         time_best(reps, [&] { k::serial::segment_sum_rows(gathered.data(), seg, d, out.data(), false); }),
         time_best(reps, [&] { k::openmp::segment_sum_rows(gathered.data(), seg, d, out.data(), false); }));
  report("scale_rows",
         time_best(reps, [&] { k::serial::scale_rows(a.data(), coeff.data(), n, d, out.data(), false); }),
         time_best(reps, [&] { k::openmp::scale_rows(a.data(), coeff.data(), n, d, out.data(), false); }));
  report("row_dots",
         time_best(reps, [&] { k::serial::row_dots(a.data(), a.data(), n, d, row_out.data(), false); }),
         time_best(reps, [&] { k::openmp::row_dots(a.data(), a.data(), n, d, row_out.data(), false); }));
  report("softmax_rows",
         time_best(reps, [&] { k::serial::softmax_rows(a.data(), n, d, out.data()); }),
         time_best(reps, [&] { k::openmp::softmax_rows(a.data(), n, d, out.data()); }));

  // End-to-end: one model forward+backward per backend on the same graph.
  {
    ModelConfig mc;
    mc.d_i = kDegreeFeatureDim;
    mc.d_e = d;
    mc.d_m = d;
    mc.d_o = 4;
    Model model(mc);
    Rng init_rng(3);
    model.init(init_rng);
    GraphInputs inputs(attach_degree_features(g));
    auto run_once = [&] {
      ForwardResult fr = model.forward(inputs);
      backward(ops::add(ops::mean_all(fr.node_repr), fr.l_cos));
      for (auto& p : model.parameters()) p.zero_grad();
    };
    k::set_backend(k::Backend::kSerial);
    const double serial_ms = time_best(reps, run_once);
    k::set_backend(k::Backend::kOpenMP);
    const double openmp_ms = time_best(reps, run_once);
    k::set_backend(k::Backend::kAuto);
    report("model fwd+bwd", serial_ms, openmp_ms);
  }
  return 0;
}
