#include <benchmark/benchmark.h>

#include <random>

#include "bellaudit/feasibility.hpp"

using namespace bellaudit;

namespace {

void BM_FeasibleLp(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  CorrelationSet c;
  c.k = k;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) c.set_pair(i, j, u(gen));
  for (auto _ : state) benchmark::DoNotOptimize(feasible_lp(c));
}
BENCHMARK(BM_FeasibleLp)->DenseRange(3, 9, 2)->Unit(benchmark::kMicrosecond);

void BM_ClosedForm(benchmark::State& state) {
  const auto c = CorrelationSet::triple(-0.5, -0.5, -0.5);
  for (auto _ : state) benchmark::DoNotOptimize(feasible_closed_form_3(c));
}
BENCHMARK(BM_ClosedForm);

}  // namespace
