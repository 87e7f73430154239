#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cadmm/admm.hpp"
#include "cadmm/kernels.hpp"

using namespace cadmm;

namespace {

Mat random_matrix(Index rows, Index cols) {
  std::mt19937_64 rng(1);
  Mat a(rows, cols);
  for (Index j = 0; j < cols; ++j) a.col(j) = random_normal(rows, Field::Complex, rng);
  return a;
}

std::vector<Vec> random_terms(Index count, Index n) {
  std::mt19937_64 rng(2);
  std::vector<Vec> t;
  for (Index i = 0; i < count; ++i) t.push_back(random_normal(n, Field::Complex, rng));
  return t;
}

// Argument 0 is the size, argument 1 the thread count (0 = serial reference).

void BM_AdjointMatvec(benchmark::State& state) {
  const Index n = 128, m = state.range(0);
  const Mat a = random_matrix(n, m);
  const Vec x = random_matrix(n, 1).col(0);
  const int threads = static_cast<int>(state.range(1));
  kernels::ThreadLimit limit(threads);
  Vec out;
  for (auto _ : state) {
    if (threads == 0) {
      kernels::serial::adjoint_matvec(a, x, out);
    } else {
      kernels::adjoint_matvec(a, x, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Matvec(benchmark::State& state) {
  const Index n = 128, m = state.range(0);
  const Mat a = random_matrix(n, m);
  const Vec v = random_matrix(m, 1).col(0);
  const int threads = static_cast<int>(state.range(1));
  kernels::ThreadLimit limit(threads);
  Vec out;
  for (auto _ : state) {
    if (threads == 0) {
      kernels::serial::matvec(a, v, out);
    } else {
      kernels::matvec(a, v, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_TreeSum(benchmark::State& state) {
  const auto terms = random_terms(state.range(0), 32);
  const int threads = static_cast<int>(state.range(1));
  kernels::ThreadLimit limit(threads);
  for (auto _ : state) {
    Vec s = threads == 0 ? kernels::serial::tree_sum(terms) : kernels::tree_sum(terms);
    benchmark::DoNotOptimize(s.data());
  }
}

void BM_Rank1ScalarUpdate(benchmark::State& state) {
  const Index m = state.range(0);
  const Vec xi = random_matrix(m, 1).col(0);
  const RVec c = RVec::Ones(m), a2 = RVec::Constant(m, 2.0);
  const std::vector<ConstraintSense> senses(static_cast<std::size_t>(m), ConstraintSense::equal());
  const int threads = static_cast<int>(state.range(1));
  kernels::ThreadLimit limit(threads);
  Vec alpha = Vec::Zero(m), nu;
  RVec tau;
  for (auto _ : state) {
    if (threads == 0) {
      kernels::serial::rank1_scalar_update(xi, alpha, nu, tau, c, senses, a2);
    } else {
      kernels::rank1_scalar_update(xi, alpha, nu, tau, c, senses, a2);
    }
    benchmark::DoNotOptimize(alpha.data());
  }
}

void sizes(benchmark::internal::Benchmark* b) {
  const int hw = kernels::max_threads();
  for (int m : {256, 4096, 32768}) {
    b->Args({m, 0});
    b->Args({m, 1});
    if (hw > 1) b->Args({m, hw});
  }
}

}  // namespace

BENCHMARK(BM_AdjointMatvec)->Apply(sizes);
BENCHMARK(BM_Matvec)->Apply(sizes);
BENCHMARK(BM_TreeSum)->Apply(sizes);
BENCHMARK(BM_Rank1ScalarUpdate)->Apply(sizes);

BENCHMARK_MAIN();
