// Posterior-summary kernel: naive serial reference vs. factored kernel, serial and OpenMP.

#include <numbers>

#include <benchmark/benchmark.h>

#include "wntorus/kernels.hpp"
#include "wntorus/reference.hpp"
#include "wntorus/simulate.hpp"

namespace {

using namespace wntorus;

struct Fixture {
  WnParams params;
  TorusSample sample;
  LatticeConfig config;
};

Fixture make_fixture(Eigen::Index p, Eigen::Index n, int J) {
  const Eigen::MatrixXd corr =
      p > 1 ? random_correlation(CorrelationSpec{p, 20.0}, 7).matrix : Eigen::MatrixXd::Ones(1, 1);
  WnParams params(Eigen::VectorXd::Constant(p, 1.0), scale_to_covariance(corr, std::numbers::pi / 2));
  return {params, sample_wn(params, n, 11), LatticeConfig{J}};
}

void BM_Reference(benchmark::State& state) {
  const Fixture f = make_fixture(state.range(0), state.range(1), static_cast<int>(state.range(2)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::posterior_summary(f.sample, f.params, f.config));
  }
}

void run_kernel(benchmark::State& state, kernels::Exec exec) {
  const Fixture f = make_fixture(state.range(0), state.range(1), static_cast<int>(state.range(2)));
  const Lattice lattice(f.config, f.params.p());
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::posterior_summary(f.sample, f.params, lattice, kernels::Moments::full, exec));
  }
}

void BM_KernelSerial(benchmark::State& state) { run_kernel(state, kernels::Exec::serial); }
void BM_KernelParallel(benchmark::State& state) { run_kernel(state, kernels::Exec::parallel); }

// {p, n, J}
#define WN_ARGS ->Args({1, 500, 3})->Args({2, 500, 3})->Args({5, 100, 2})->Unit(benchmark::kMillisecond)

BENCHMARK(BM_Reference) WN_ARGS;
BENCHMARK(BM_KernelSerial) WN_ARGS->Args({10, 100, 1});
BENCHMARK(BM_KernelParallel) WN_ARGS->Args({10, 100, 1});

}  // namespace

BENCHMARK_MAIN();
