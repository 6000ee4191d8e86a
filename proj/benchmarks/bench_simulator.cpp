#include <benchmark/benchmark.h>

#include <numbers>

#include "bellaudit/simulator.hpp"
#include "bellaudit/stats.hpp"

using namespace bellaudit;

namespace {

std::vector<Setting> triple() {
  using std::numbers::pi;
  return {Setting::planar("a", 0.0), Setting::planar("b", pi / 3), Setting::planar("c", 2 * pi / 3)};
}

void BM_RunExperiment(benchmark::State& state) {
  ModelConfig m;
  m.kind = static_cast<ModelKind>(state.range(0));
  m.encoding = Encoding::Polarization;
  const auto s = triple();
  const auto n = static_cast<std::uint64_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(m, s, Schedule::bell_triple(s), n, 7));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_RunExperiment)
    ->ArgsProduct({{0, 1, 2}, {100'000}})
    ->ArgNames({"model", "n"})
    ->Unit(benchmark::kMillisecond);

void BM_MatchWindow(benchmark::State& state) {
  ModelConfig m;
  m.kind = ModelKind::TimeTag;
  m.encoding = Encoding::Polarization;
  const auto s = triple();
  const auto d = run_experiment(m, s, Schedule::bell_triple(s), 300'000, 7);
  const CoincidenceIndex index(d);
  const double w = 1e-3 * static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(index.match(CoincidenceWindow::of(w)));
  state.SetItemsProcessed(state.iterations() * 300'000);
}
BENCHMARK(BM_MatchWindow)->Arg(1)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_BuildIndex(benchmark::State& state) {
  ModelConfig m;
  m.kind = ModelKind::TimeTag;
  const auto s = triple();
  const auto d = run_experiment(m, s, Schedule::bell_triple(s), 300'000, 7);
  for (auto _ : state) benchmark::DoNotOptimize(CoincidenceIndex(d));
}
BENCHMARK(BM_BuildIndex)->Unit(benchmark::kMillisecond);

void BM_CountPair(benchmark::State& state) {
  const auto s = triple();
  const auto d = run_experiment(ModelConfig{}, s, Schedule::bell_triple(s), 300'000, 7);
  for (auto _ : state) benchmark::DoNotOptimize(count_pair(d, "a", "b"));
}
BENCHMARK(BM_CountPair)->Unit(benchmark::kMillisecond);

}  // namespace
