// Wall-clock comparison of the parallel kernels against their serial
// references, plus the dense vs structured trace-distance routes.
//
//   qot_bench [max_n] [trials]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <vector>

#include <omp.h>

#include "qot/discrimination.hpp"
#include "qot/montecarlo.hpp"

namespace {

template <class Fn>
double seconds(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int max_n = argc > 1 ? std::atoi(argv[1]) : 1000;
  const long trials = argc > 2 ? std::atol(argv[2]) : 100000;
  std::printf("threads: %d\n", omp_get_max_threads());

  std::vector<int> ns(static_cast<std::size_t>(max_n));
  std::iota(ns.begin(), ns.end(), 1);

  qot::TraceDistanceCurve serial, parallel;
  const double t_sweep_serial = seconds([&] { serial = qot::sweep_trace_distance_serial(ns, 1); });
  const double t_sweep_parallel = seconds([&] { parallel = qot::sweep_trace_distance(ns, 1); });
  std::printf("sweep n=1..%d        serial %8.3f s   parallel %8.3f s   D(%d)=%.6f\n", max_n, t_sweep_serial,
              t_sweep_parallel, max_n, parallel.points.back().trace_distance);

  const qot::ProtocolGeometry g(max_n, 1);
  double d_dense = 0.0, d_struct = 0.0;
  const double t_dense = seconds([&] {
    d_dense = qot::trace_distance(qot::build_rho(g, 0), qot::build_rho(g, 1));
  });
  const double t_struct = seconds([&] { d_struct = qot::trace_distance_structured(g); });
  std::printf("trace distance n=%d  dense  %8.3f s   structured %6.3f s   |diff|=%.2e\n", max_n, t_dense,
              t_struct, std::abs(d_dense - d_struct));

  qot::ExperimentSpec spec;
  spec.trials = trials;
  spec.geometry = qot::ProtocolGeometry(100, 1);
  qot::ExperimentStats s_serial, s_parallel;
  const double t_mc_serial = seconds([&] { s_serial = qot::run_experiment_serial(spec); });
  const double t_mc_parallel = seconds([&] { s_parallel = qot::run_experiment(spec); });
  std::printf("montecarlo %ld trials serial %8.3f s   parallel %8.3f s   avg_R=%.4f/%.4f\n", trials, t_mc_serial,
              t_mc_parallel, s_serial.avg_reliability, s_parallel.avg_reliability);
  return 0;
}
