// Serial reference kernels against their OpenMP forms on a synthetic SBM
// graph. Run with --benchmark_filter to pick a kernel.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "cgcn/kernels.hpp"
#include "cgcn/rng.hpp"
#include "cgcn/sparse.hpp"
#include "cgcn/synth.hpp"

namespace {

using namespace cgcn;

const SparseMatrix& bench_graph() {
  static const SparseMatrix a = [] {
    const auto g = synth::sbm({1000, 1000, 1000, 1000}, 0.01, 0.0005, 7);
    return row_normalize_aug(from_edges(g.edges, g.n));
  }();
  return a;
}

DenseMatrix random_dense(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  DenseMatrix m(rows, cols);
  Rng rng(seed);
  for (double& v : m.values()) v = uniform01(rng) - 0.5;
  return m;
}

void BM_SpmmSerial(benchmark::State& state) {
  const auto& a = bench_graph();
  const DenseMatrix x = random_dense(a.n_cols, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::spmm(a, x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.nnz()) * state.range(0));
}

void BM_SpmmOmp(benchmark::State& state) {
  const auto& a = bench_graph();
  const DenseMatrix x = random_dense(a.n_cols, static_cast<std::size_t>(state.range(0)), 1);
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::spmm(a, x, threads));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.nnz()) * state.range(0));
}

void BM_GemmSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseMatrix a = random_dense(4000, n, 2), b = random_dense(n, 64, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::gemm(a, b));
}

void BM_GemmOmp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseMatrix a = random_dense(4000, n, 2), b = random_dense(n, 64, 3);
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::gemm(a, b, threads));
}

void BM_GemmTnSerial(benchmark::State& state) {
  const DenseMatrix a = random_dense(4000, static_cast<std::size_t>(state.range(0)), 4);
  const DenseMatrix g = random_dense(4000, 64, 5);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::gemm_tn(a, g));
}

void BM_GemmTnOmp(benchmark::State& state) {
  const DenseMatrix a = random_dense(4000, static_cast<std::size_t>(state.range(0)), 4);
  const DenseMatrix g = random_dense(4000, 64, 5);
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::gemm_tn(a, g, threads));
}

void thread_args(benchmark::internal::Benchmark* b) {
  const int max_threads = omp_get_max_threads();
  for (int width : {16, 64, 256}) {
    for (int t = 1; t <= max_threads; t *= 2) b->Args({width, t});
  }
}

}  // namespace

BENCHMARK(BM_SpmmSerial)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_SpmmOmp)->Apply(thread_args);
BENCHMARK(BM_GemmSerial)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_GemmOmp)->Apply(thread_args);
BENCHMARK(BM_GemmTnSerial)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_GemmTnOmp)->Apply(thread_args);

BENCHMARK_MAIN();
