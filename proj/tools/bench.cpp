// Timing harness: serial vs parallel banded matvec, and path tracing at
// several worker counts. Checks that parallel results are bit-identical to
// the serial reference while reporting throughput.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

#include "gpe/band_matrix.hpp"
#include "gpe/discretize.hpp"
#include "gpe/homotopy.hpp"
#include "gpe/kernels.hpp"
#include "gpe/tracer.hpp"

using Clock = std::chrono::steady_clock;

static double secs(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

static void bench_matvec() {
  const std::size_t n = 400000;
  gpe::SymBandMatrix M = gpe::SymBandMatrix::zeros(n, {0, 1, 640});
  for (std::size_t i = 0; i < n; ++i) M.bands[0][i] = 4.0 + std::sin(0.01 * double(i));
  for (std::size_t i = 0; i + 1 < n; ++i) M.bands[1][i] = -1.0 + 0.1 * std::sin(0.03 * double(i));
  for (std::size_t i = 0; i + 640 < n; ++i) M.bands[2][i] = -0.5;
  std::vector<double> x(n), ys(n), yp(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.7 * double(i));

  const int reps = 40;
  auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) gpe::kernels::matvec_serial(M, x.data(), ys.data());
  auto t1 = Clock::now();
  for (int r = 0; r < reps; ++r) gpe::kernels::matvec_parallel(M, x.data(), yp.data());
  auto t2 = Clock::now();

  bool identical = std::memcmp(ys.data(), yp.data(), n * sizeof(double)) == 0;
  const double flops = 2.0 * double(reps) * (3.0 * 2.0 - 1.0) * double(n) / 1e9;  // rough
  std::printf("matvec n=%zu reps=%d\n", n, reps);
  std::printf("  serial   %.3f s  (%.2f GF/s)\n", secs(t0, t1), flops / secs(t0, t1));
  std::printf("  parallel %.3f s  (%.2f GF/s)\n", secs(t1, t2), flops / secs(t1, t2));
  std::printf("  bit-identical: %s\n", identical ? "yes" : "NO  <-- BUG");
}

static void bench_trace() {
  gpe::ProblemSpec spec;
  spec.dim = 1;
  spec.dom = {-2.0, 2.0, 0.0, 0.0};
  spec.n = 299;
  spec.beta = 20.0;
  gpe::HomotopyProblem p = gpe::make_homotopy(spec, gpe::RandomMatrixKind::Diag1D, 1);
  gpe::TraceConfig cfg;
  std::vector<int> which = {1, 2, 3, 4, 5, 6, 7, 8};

  std::vector<double> ref;
  for (int workers : {1, 2, 4}) {
    auto t0 = Clock::now();
    std::vector<gpe::PathResult> res = gpe::trace_all(p, cfg, which, workers);
    auto t1 = Clock::now();
    long steps = 0;
    std::vector<double> lam;
    for (const auto& r : res) {
      steps += r.steps_accepted;
      lam.push_back(r.lambda);
    }
    bool same = true;
    if (ref.empty())
      ref = lam;
    else
      same = std::memcmp(ref.data(), lam.data(), lam.size() * sizeof(double)) == 0;
    std::printf("trace n=%zu paths=%zu workers=%d: %.3f s, %ld steps, identical: %s\n", p.size(),
                which.size(), workers, secs(t0, t1), steps, same ? "yes" : "NO  <-- BUG");
  }
}

int main() {
  bench_matvec();
  bench_trace();
  return 0;
}
