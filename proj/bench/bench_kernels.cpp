#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "../tests/support/fixtures.hpp"
#include "eigdef/edm.hpp"
#include "eigdef/kernels.hpp"

using namespace eigdef;

namespace {

ComplexMatrix random_block(Index rows, Index cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  ComplexMatrix out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) out(i, j) = Complex(g(rng), g(rng));
  }
  return out;
}

template <kernels::Backend B>
void BM_Blend(benchmark::State& state) {
  const Index n = state.range(0);
  const ComplexMatrix block = random_block(n, 8, 1);
  std::vector<kernels::ConstColumn> cols;
  for (Index k = 0; k < 8; ++k) cols.emplace_back(block.col(k).data(), n);
  const std::vector<double> w(8, 0.125);
  ComplexVector out(n);
  for (auto _ : state) {
    if constexpr (B == kernels::Backend::kSerial) kernels::serial::blend(cols, w, out);
    else kernels::omp::blend(cols, w, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <kernels::Backend B>
void BM_AffineCombine(benchmark::State& state) {
  const Index n = state.range(0);
  const ComplexMatrix basis = random_block(n, 2, 2);
  const ComplexVector mean = random_block(n, 1, 3);
  const ComplexVector c = random_block(2, 1, 4);
  ComplexVector out(n);
  for (auto _ : state) {
    if constexpr (B == kernels::Backend::kSerial) kernels::serial::affine_combine(mean, basis, c, out);
    else kernels::omp::affine_combine(mean, basis, c, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <kernels::Backend B>
void BM_CenterColumns(benchmark::State& state) {
  const Index n = state.range(0);
  const ComplexMatrix snaps = random_block(n, 8, 5);
  ComplexVector mean(n);
  ComplexMatrix dev(n, 8);
  for (auto _ : state) {
    if constexpr (B == kernels::Backend::kSerial) kernels::serial::center_columns(snaps, mean, dev);
    else kernels::omp::center_columns(snaps, mean, dev);
    benchmark::DoNotOptimize(dev.data());
  }
}

template <kernels::Backend B>
void BM_Synthesize(benchmark::State& state) {
  const Index n = state.range(0);
  const ComplexMatrix basis = random_block(n, 6, 6);
  const ComplexMatrix reduced = random_block(6, 100, 7);
  const RealVector offset = RealVector::Zero(n);
  RealMatrix states(n, 100);
  for (auto _ : state) {
    double r = 0.0;
    if constexpr (B == kernels::Backend::kSerial) r = kernels::serial::synthesize(basis, reduced, offset, states);
    else r = kernels::omp::synthesize(basis, reduced, offset, states);
    benchmark::DoNotOptimize(r);
  }
}

// Per-query construction of all m modes, n = 2e4, p = 8, r = 2.
struct QueryFixture {
  modal::ModeDatabase db = testing::synthetic_database(20000, 8, 6, 11);
  std::vector<edm::EdmBasis> bases = edm::compute_all_edm_bases(db, edm::ExplicitRank{2});
};

QueryFixture& query_fixture() {
  static QueryFixture f;
  return f;
}

void BM_DirectQuery(benchmark::State& state) {
  auto& f = query_fixture();
  const auto scheme = static_cast<Scheme>(state.range(0));
  for (auto _ : state) {
    for (Index i = 0; i < f.db.m; ++i) benchmark::DoNotOptimize(edm::direct_interpolate(f.db, i, 0.37, scheme));
  }
}

void BM_EdmQuery(benchmark::State& state) {
  auto& f = query_fixture();
  const auto scheme = static_cast<Scheme>(state.range(0));
  for (auto _ : state) {
    for (const auto& b : f.bases) benchmark::DoNotOptimize(edm::interpolate_mode(b, 0.37, scheme));
  }
}

}  // namespace

BENCHMARK_TEMPLATE(BM_Blend, kernels::Backend::kSerial)->Arg(20000)->Arg(200000);
BENCHMARK_TEMPLATE(BM_Blend, kernels::Backend::kOpenMP)->Arg(20000)->Arg(200000);
BENCHMARK_TEMPLATE(BM_AffineCombine, kernels::Backend::kSerial)->Arg(20000)->Arg(200000);
BENCHMARK_TEMPLATE(BM_AffineCombine, kernels::Backend::kOpenMP)->Arg(20000)->Arg(200000);
BENCHMARK_TEMPLATE(BM_CenterColumns, kernels::Backend::kSerial)->Arg(20000)->Arg(200000);
BENCHMARK_TEMPLATE(BM_CenterColumns, kernels::Backend::kOpenMP)->Arg(20000)->Arg(200000);
BENCHMARK_TEMPLATE(BM_Synthesize, kernels::Backend::kSerial)->Arg(2000)->Arg(20000);
BENCHMARK_TEMPLATE(BM_Synthesize, kernels::Backend::kOpenMP)->Arg(2000)->Arg(20000);
BENCHMARK(BM_DirectQuery)->Arg(static_cast<int>(Scheme::kLinear))->Arg(static_cast<int>(Scheme::kCubicSpline));
BENCHMARK(BM_EdmQuery)->Arg(static_cast<int>(Scheme::kLinear))->Arg(static_cast<int>(Scheme::kCubicSpline));

BENCHMARK_MAIN();
