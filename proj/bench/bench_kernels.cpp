// Reference vs OpenMP kernels. Args are {N, k, threads}.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "lrshrink/benchmark.hpp"
#include "lrshrink/kernels.hpp"
#include "lrshrink/shrinkage.hpp"

using namespace lrshrink;

namespace {

Matrix data(Index n, Index k) {
  std::mt19937_64 g(42);
  std::normal_distribution<double> z;
  Matrix x(n, k);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < k; ++j) x(i, j) = z(g);
  return x;
}

void shapes(benchmark::internal::Benchmark* b) {
  for (int k : {50, 200}) {
    for (int n : {40, 400}) {
      for (int t : {1, 4}) b->Args({n, k, t});
    }
  }
}

void reference_shapes(benchmark::internal::Benchmark* b) {
  for (int k : {50, 200}) {
    for (int n : {40, 400}) b->Args({n, k, 1});
  }
}

void BM_CovarianceReference(benchmark::State& state) {
  const Matrix x = data(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::reference::covariance(x));
}
BENCHMARK(BM_CovarianceReference)->Apply(reference_shapes);

void BM_CovarianceParallel(benchmark::State& state) {
  const Matrix x = data(state.range(0), state.range(1));
  omp_set_num_threads(static_cast<int>(state.range(2)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::covariance(x));
}
BENCHMARK(BM_CovarianceParallel)->Apply(shapes)->UseRealTime();

void BM_DiagonalMomentsReference(benchmark::State& state) {
  const Matrix x = data(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::reference::diagonal_moments(x));
}
BENCHMARK(BM_DiagonalMomentsReference)->Apply(reference_shapes);

void BM_DiagonalMomentsParallel(benchmark::State& state) {
  const Matrix x = data(state.range(0), state.range(1));
  omp_set_num_threads(static_cast<int>(state.range(2)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::diagonal_moments(x));
}
BENCHMARK(BM_DiagonalMomentsParallel)->Apply(shapes)->UseRealTime();

// LU ALR target moments: explicit per-sample target vs the separable kernel.
void BM_LuTargetMomentsReference(benchmark::State& state) {
  const Matrix x = data(state.range(0), state.range(1));
  const kernels::LinearTarget target = [](const Matrix& w) { return lu_alr_target_map(w); };
  for (auto _ : state) benchmark::DoNotOptimize(kernels::reference::target_moments(x, target));
}
BENCHMARK(BM_LuTargetMomentsReference)->Args({40, 50, 1})->Args({400, 50, 1})->Args({40, 200, 1});

void BM_LuLambdaParallel(benchmark::State& state) {
  const Matrix x = data(state.range(0), state.range(1));
  omp_set_num_threads(static_cast<int>(state.range(2)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_lambda_general(x, TargetKind::LuAlr));
}
BENCHMARK(BM_LuLambdaParallel)->Apply(shapes)->UseRealTime();

void BM_SyntheticBenchmark(benchmark::State& state) {
  BenchmarkScenario s;
  s.parts = 40;
  s.sample_sizes = {8, 40, 200};
  s.repetitions = 32;
  const auto pool = generate_pool_truth(240, 1);
  for (auto _ : state) benchmark::DoNotOptimize(run_synthetic_benchmark(s, pool, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SyntheticBenchmark)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
