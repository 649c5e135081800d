// Timings of the worker-pool kernels against their serial references.

#include <chrono>
#include <cstdio>
#include <string>

#include "pmm/connect.hpp"
#include "pmm/entropy.hpp"
#include "pmm/kmc.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double seconds(std::chrono::steady_clock::time_point a,
               std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <typename F>
double timed(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  auto t1 = std::chrono::steady_clock::now();
  return seconds(t0, t1);
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-34s %9.3fs %9.3fs %7.2fx\n", name, serial, parallel,
              parallel > 0 ? serial / parallel : 0.0);
}

}  // namespace

int main(int argc, char** argv) {
  int jobs =
#ifdef _OPENMP
      omp_get_max_threads();
#else
      1;
#endif
  if (argc > 1) jobs = std::stoi(argv[1]);
  std::printf("worker pool size: %d\n", jobs);
  std::printf("%-34s %10s %10s %8s\n", "kernel", "serial", "parallel", "speedup");

  auto fam = pmm::pmm_family();

  {
    const int n = 22;
    const std::uint32_t start = (1u << 8) - 1;  // eight-particle block
    double s = timed([&] { (void)pmm::reachable_masks(fam, start, n); });
    double p = timed([&] { (void)pmm::reachable_masks_parallel(fam, start, n); });
    report("state-space closure (22 sites)", s, p);
  }
  {
    double s = timed([&] { (void)pmm::certify_connectivity(fam, 10, true, 1); });
    double p = timed([&] { (void)pmm::certify_connectivity(fam, 10, true, jobs); });
    report("connectivity certification (10)", s, p);
  }
  {
    auto init = pmm::Configuration::from_string("110010100101001010010100",
                                                0, pmm::Boundary::Periodic);
    pmm::RunOptions opt{20000.0, 0, false};
    double s = timed([&] { (void)pmm::run_ensemble(fam, init, opt, 16, 7, 1); });
    double p = timed([&] { (void)pmm::run_ensemble(fam, init, opt, 16, 7, jobs); });
    report("replica ensemble (16 x 2e4 t)", s, p);
  }
  {
    double s = timed([&] { (void)pmm::sweep_beta_alpha(fam, 6, 4000, 3, 1); });
    double p = timed([&] { (void)pmm::sweep_beta_alpha(fam, 6, 4000, 3, jobs); });
    report("dissipation sweep (4000 x 6)", s, p);
  }
  return 0;
}
