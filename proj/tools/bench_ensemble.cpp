// Times the OpenMP ensemble kernel against the serial reference and checks
// they agree bit for bit.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "vacfield/model.hpp"
#include "vacfield/moments.hpp"
#include "vacfield/rng.hpp"
#include "vacfield/stochastic.hpp"

using namespace vacfield;
using Clock = std::chrono::steady_clock;

int main(int argc, char** argv) {
  const int sites = argc > 1 ? std::atoi(argv[1]) : 64;
  const long samples = argc > 2 ? std::atol(argv[2]) : 200000;
  const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 42;

  auto basis = model::build_basis(model::Lattice(sites),
                                  moments::random_wavefunction(sites, derive_seed(seed, 0)));
  auto v = moments::random_subvolume(sites, derive_seed(seed, 1));
  stochastic::AmplitudeModel amp{stochastic::AmplitudeKind::complex_gaussian};

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("sites %d, samples %ld, seed %llu, max threads %d\n", sites, samples,
              static_cast<unsigned long long>(seed), threads);

  auto t0 = Clock::now();
  auto serial = stochastic::ensemble_statistics_serial(basis, amp, v, samples, seed);
  auto t1 = Clock::now();
  auto parallel = stochastic::ensemble_statistics(basis, amp, v, samples, seed);
  auto t2 = Clock::now();

  const double serial_s = std::chrono::duration<double>(t1 - t0).count();
  const double parallel_s = std::chrono::duration<double>(t2 - t1).count();
  std::printf("serial   %.3f s\n", serial_s);
  std::printf("parallel %.3f s  (speedup %.2fx)\n", parallel_s, serial_s / parallel_s);

  const bool identical = serial.raw_mean == parallel.raw_mean &&
                         serial.sub_mean == parallel.sub_mean &&
                         (serial.mean_density - parallel.mean_density).cwiseAbs().maxCoeff() == 0.0;
  std::printf("bit-identical summaries: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
