// Times the OpenMP interval scan against the serial reference path and checks
// that both produce identical fits, plus the same comparison for sampling.

#include <chrono>
#include <cstdio>
#include <string>

#include "coretail/families.hpp"
#include "coretail/fit.hpp"

using namespace coretail;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

void bench_family(Family f, const FamilyParams& gen, std::size_t n) {
  const auto data = sample_variates(gen, n, 42);
  const auto sample = SortedSample::from_values(data);

  FitOptions serial;
  serial.parallel = false;
  FitOptions parallel;
  parallel.parallel = true;

  auto t0 = std::chrono::steady_clock::now();
  const FitResult rs = fit(f, sample, serial);
  const double t_serial = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  const FitResult rp = fit(f, sample, parallel);
  const double t_parallel = ms_since(t0);

  const bool same = rs.loglik == rp.loglik &&
                    rs.params.alpha == rp.params.alpha &&
                    rs.params.x_min == rp.params.x_min;
  std::printf("%-11s n=%-7zu serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   identical=%s\n",
              std::string(family_name(f)).c_str(), n, t_serial, t_parallel,
              t_serial / t_parallel, same ? "yes" : "NO");
}

}  // namespace

int main() {
  std::printf("scan benchmark (alpha=2, x_min=10 synthetic data)\n");
  for (std::size_t n : {std::size_t{20000}, std::size_t{100000}}) {
    bench_family(Family::uni, uni_params(2.0, 10.0), n);
    bench_family(Family::pow, general_params(Family::pow, 2.0, 1.0, 10.0), n);
    bench_family(Family::forced_exp, forced_params(Family::forced_exp, 2.0, 10.0), n);
    bench_family(Family::exp, general_params(Family::exp, 2.0, 1.0, 10.0), n);
  }

  std::printf("\nsampling benchmark\n");
  const auto p = general_params(Family::alg, 2.0, 1.0, 10.0);
  for (std::size_t n : {std::size_t{200000}, std::size_t{1000000}}) {
    auto t0 = std::chrono::steady_clock::now();
    const auto a = sample_variates(p, n, 7, false);
    const double t_serial = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto b = sample_variates(p, n, 7, true);
    const double t_parallel = ms_since(t0);
    std::printf("alg sample  n=%-7zu serial %9.1f ms   parallel %9.1f ms   identical=%s\n",
                n, t_serial, t_parallel, a == b ? "yes" : "NO");
  }
  return 0;
}
