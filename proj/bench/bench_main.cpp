// Wall-clock comparison of the OpenMP drivers against their serial
// references. Sizes: bench [videos] [annotations_per_video] [splits] [reps].

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "memdecay/fit.hpp"
#include "memdecay/metrics.hpp"
#include "memdecay/simulate.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    const auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0)
                              .count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-24s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  memdecay::SimSpec spec;
  spec.n_videos = argc > 1 ? std::atoi(argv[1]) : 2000;
  spec.annotations_per_video = argc > 2 ? std::atoi(argv[2]) : 90;
  const int splits = argc > 3 ? std::atoi(argv[3]) : 25;
  const int reps = argc > 4 ? std::atoi(argv[4]) : 3;
  spec.seed = 7;

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both columns run serially\n");
#endif
  std::printf("%d videos x %d annotations, %d splits, best of %d\n\n",
              spec.n_videos, spec.annotations_per_video, splits, reps);
  std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "parallel",
              "speedup");

  const double sim_s = best_of(
      reps, [&] { (void)memdecay::simulate_dataset_serial(spec); });
  const double sim_p =
      best_of(reps, [&] { (void)memdecay::simulate_dataset(spec); });
  report("simulate_dataset", sim_s, sim_p);

  const memdecay::SimResult data = memdecay::simulate_dataset_serial(spec);
  const memdecay::FitConfig cfg;
  const double fit_s = best_of(
      reps, [&] { (void)memdecay::fit_all_serial(data.records, cfg); });
  const double fit_p =
      best_of(reps, [&] { (void)memdecay::fit_all(data.records, cfg); });
  report("fit_all", fit_s, fit_p);

  const double cons_s = best_of(reps, [&] {
    (void)memdecay::split_half_consistency_serial(data.records, splits, 7);
  });
  const double cons_p = best_of(reps, [&] {
    (void)memdecay::split_half_consistency(data.records, splits, 7);
  });
  report("split_half_consistency", cons_s, cons_p);
  return 0;
}
