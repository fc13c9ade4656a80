#include <benchmark/benchmark.h>

#include <map>
#include <random>
#include <vector>

#include "cclab/cumulants.hpp"
#include "cclab/partition.hpp"
#include "cclab/spin_chain.hpp"

namespace {

void BM_EnumeratePartitions(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto family = cclab::enumerate_partitions(n);
    benchmark::DoNotOptimize(family.members.data());
  }
}
BENCHMARK(BM_EnumeratePartitions)->DenseRange(6, 10);

void BM_EnumerateNoncrossing(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto family = cclab::enumerate_noncrossing(n);
    benchmark::DoNotOptimize(family.members.data());
  }
}
BENCHMARK(BM_EnumerateNoncrossing)->DenseRange(8, 12);

cclab::MomentProvider synthetic_moments(int k) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::map<std::vector<int>, cclab::Complex> m;
  for (int mask = 1; mask < (1 << k); ++mask) {
    std::vector<int> tuple;
    for (int i = 0; i < k; ++i)
      if (mask >> i & 1) tuple.push_back(i + 1);
    m[tuple] = cclab::Complex(u(rng), u(rng));
  }
  return cclab::map_moment_provider(k, std::move(m));
}

void BM_ClassicalCumulant(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  auto p = synthetic_moments(k);
  std::vector<int> full;
  for (int i = 1; i <= k; ++i) full.push_back(i);
  for (auto _ : state) {
    auto c = cclab::classical_cumulant(p, full);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_ClassicalCumulant)->DenseRange(4, 8);

void BM_FreeCumulant(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  auto p = synthetic_moments(k);
  std::vector<int> full;
  for (int i = 1; i <= k; ++i) full.push_back(i);
  for (auto _ : state) {
    auto c = cclab::free_cumulant(p, full);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_FreeCumulant)->DenseRange(4, 8);

void BM_GibbsBuild(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const cclab::ChainModel model = cclab::tfim_model(L, 1.0, 1.05, 0.2);
  for (auto _ : state) {
    auto ens = cclab::make_ensemble(model);
    benchmark::DoNotOptimize(ens.trace_error());
  }
}
BENCHMARK(BM_GibbsBuild)->DenseRange(6, 9)->Unit(benchmark::kMillisecond);

void BM_MomentEval(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  auto ens = cclab::make_ensemble(cclab::tfim_model(L, 1.0, 1.05, 0.2));
  const auto z0 = cclab::LocalOperator::from_pauli(cclab::pauli_string_at(L, "Z", 0));
  const auto z3 = cclab::LocalOperator::from_pauli(cclab::pauli_string_at(L, "Z", 3));
  std::vector<cclab::Operand> operands = {{z0, 0.3}, {z3, 0.0}};
  const std::vector<int> pair = {1, 2};
  for (auto _ : state) {
    auto p = cclab::make_moment_provider(ens, operands);
    auto v = p(pair);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_MomentEval)->DenseRange(6, 9)->Unit(benchmark::kMillisecond);

}  // namespace
