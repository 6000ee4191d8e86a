#include <benchmark/benchmark.h>

#include <random>

#include "bellaudit/algebra.hpp"

using namespace bellaudit;

namespace {

// Ring of n variables with one frustrated edge plus random chords.
Expression ring(int n, unsigned seed) {
  std::mt19937 gen(seed);
  Expression e;
  auto v = [](int i) { return Variable{Station::A, "s" + std::to_string(i), std::nullopt}; };
  for (int i = 0; i < n; ++i) e.terms.push_back(Term{Rational(i == 0 ? -1 : 1), {v(i), v((i + 1) % n)}});
  for (int k = 0; k < n / 2; ++k) e.terms.push_back(Term{Rational(1, 2), {v(gen() % n), v(gen() % n)}});
  return e;
}

void BM_TightBounds(benchmark::State& state) {
  const auto e = ring(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(tight_bounds(e, {}, 1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TightBounds)->DenseRange(8, 20, 4)->Unit(benchmark::kMillisecond);

void BM_FrustratedCycle(benchmark::State& state) {
  const auto e = ring(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(frustrated_cycle(e));
}
BENCHMARK(BM_FrustratedCycle)->RangeMultiplier(4)->Range(16, 4096);

void BM_Builtins(benchmark::State& state) {
  const auto e = builtin_expression("bell3");
  for (auto _ : state) benchmark::DoNotOptimize(has_cyclicity(e, ConstraintSet{true}));
}
BENCHMARK(BM_Builtins);

}  // namespace
