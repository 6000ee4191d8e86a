#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "bellaudit/errors.hpp"
#include "bellaudit/simulator.hpp"
#include "bellaudit/stats.hpp"

using namespace bellaudit;
using std::numbers::pi;

namespace {

std::vector<Setting> tri_settings() {
  return {Setting::planar("a", 0.0), Setting::planar("b", 2 * pi / 3), Setting::planar("c", 4 * pi / 3)};
}

Dataset two_streams(const std::vector<double>& ta, const std::vector<double>& tb) {
  Dataset d;
  d.settings = {Setting::planar("a", 0.0), Setting::planar("b", 1.0)};
  for (std::size_t i = 0; i < ta.size(); ++i) {
    d.trials.push_back(make_trial(i, "a", Outcome::plus(), ta[i], "b", Outcome::minus(), tb[i], false));
  }
  return d;
}

}  // namespace

TEST_CASE("single trial is labeled (A,0) and (B,0)") {
  ModelConfig cfg;
  cfg.kind = ModelKind::DeterministicSign;
  const auto s = tri_settings();
  const auto d = run_experiment(cfg, s, Schedule::fixed({{"a", "b"}}), 1, 5);
  REQUIRE(d.trials.size() == 1);
  CHECK(d.trials[0].event_a.label == SpaceTimeLabel{Station::A, 0, 0.0});
  CHECK(d.trials[0].event_b.label == SpaceTimeLabel{Station::B, 0, 0.0});
  CHECK(d.metadata.model == "deterministic");
  CHECK(validate_dataset(d).empty());
}

TEST_CASE("configuration errors") {
  ModelConfig cfg;
  const auto s = tri_settings();
  CHECK_THROWS_AS(run_experiment(cfg, s, Schedule::fixed({{"a", "z"}}), 10, 1), ConfigError);
  CHECK_THROWS_AS(run_experiment(cfg, s, Schedule::fixed({{"a", "b"}}), 0, 1), ConfigError);
  Schedule bad = Schedule::uniform({{"a", "b"}});
  bad.explicit_pairs = {{"b", "c"}};
  CHECK_THROWS_AS(run_experiment(cfg, s, bad, 10, 1), ConfigError);
  CHECK_THROWS_AS(CoincidenceWindow::of(0.0), ConfigError);
  CHECK(CoincidenceWindow::of(INFINITY).is_infinite());
}

TEST_CASE("orthogonal quantum run has E near zero") {
  ModelConfig cfg;
  const std::vector<Setting> s{Setting::planar("a", 0.0), Setting::planar("b", pi / 2)};
  const std::uint64_t n = 100000;
  const auto d = run_experiment(cfg, s, Schedule::fixed({{"a", "b"}}), n, 77);
  const auto est = estimate_correlation(count_pair(d, "a", "b"));
  CHECK(std::abs(est.value) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("uniform schedule is binomially balanced") {
  ModelConfig cfg;
  const auto s = tri_settings();
  const std::uint64_t n = 100000;
  const auto d = run_experiment(cfg, s, Schedule::bell_triple(s), n, 8);
  std::map<std::pair<std::string, std::string>, std::uint64_t> counts;
  for (const auto& t : d.trials) ++counts[{t.event_a.setting, t.event_b.setting}];
  CHECK(counts.size() == 3);
  const double sigma = std::sqrt(n * (1.0 / 3.0) * (2.0 / 3.0));
  for (const auto& [pair, c] : counts) CHECK(std::abs(static_cast<double>(c) - n / 3.0) < 5 * sigma);
}

TEST_CASE("explicit schedule is followed in order") {
  ModelConfig cfg;
  const auto s = tri_settings();
  const auto d = run_experiment(cfg, s, Schedule::fixed({{"a", "b"}, {"b", "c"}}), 5, 1);
  CHECK(d.trials[0].event_a.setting == "a");
  CHECK(d.trials[1].event_a.setting == "b");
  CHECK(d.trials[4].event_b.setting == "b");
}

TEST_CASE("label freshness and seed determinism across thread counts") {
  ModelConfig cfg;
  cfg.kind = ModelKind::TimeTag;
  cfg.encoding = Encoding::Polarization;
  const auto s = tri_settings();
  const auto d1 = run_experiment(cfg, s, Schedule::bell_triple(s), 5000, 99, {1});
  const auto d4 = run_experiment(cfg, s, Schedule::bell_triple(s), 5000, 99, {4});
  const auto d7 = run_experiment(cfg, s, Schedule::bell_triple(s), 5000, 99, {7});
  CHECK(validate_dataset(d1).empty());
  std::set<std::pair<Station, std::uint64_t>> labels;
  for (std::size_t i = 0; i < d1.trials.size(); ++i) {
    const auto& x = d1.trials[i];
    CHECK(labels.insert({x.event_a.label.station, x.event_a.label.trial_index}).second);
    CHECK(labels.insert({x.event_b.label.station, x.event_b.label.trial_index}).second);
    for (const auto* y : {&d4.trials[i], &d7.trials[i]}) {
      CHECK(x.event_a.time_tag == y->event_a.time_tag);
      CHECK(x.event_b.time_tag == y->event_b.time_tag);
      CHECK(x.event_a.outcome == y->event_a.outcome);
      CHECK(x.event_b.setting == y->event_b.setting);
    }
  }
  const auto other = run_experiment(cfg, s, Schedule::bell_triple(s), 5000, 100);
  bool differs = false;
  for (std::size_t i = 0; i < other.trials.size() && !differs; ++i) {
    differs = other.trials[i].event_a.time_tag != d1.trials[i].event_a.time_tag;
  }
  CHECK(differs);
}

TEST_CASE("greedy matcher: worked example") {
  const auto d = two_streams({0.0, 10.0}, {0.1, 20.0});
  const auto pairs = find_coincidences(d, CoincidenceWindow::of(0.5));
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].trial_a == 0);
  CHECK(pairs[0].trial_b == 0);
  const auto m = match_coincidences(d, CoincidenceWindow::of(0.5));
  CHECK(m.trials[0].matched);
  CHECK_FALSE(m.trials[1].matched);
  CHECK(*m.metadata.window == 0.5);
}

TEST_CASE("infinite window matches every trial") {
  const auto d = two_streams({0.0, 10.0, 25.0}, {5.0, 20.0, 1.0});
  const auto m = match_coincidences(d, CoincidenceWindow::infinite());
  for (const auto& t : m.trials) CHECK(t.matched);
  CHECK_FALSE(m.metadata.window.has_value());
}

TEST_CASE("cross-trial pairs and same-trial mode") {
  // A of trial 0 is delayed past B of trial 1.
  const auto d = two_streams({1.05, 1.2}, {0.0, 1.0});
  const auto nearest = find_coincidences(d, CoincidenceWindow::of(0.1));
  REQUIRE(nearest.size() == 1);
  CHECK(nearest[0].trial_a == 0);
  CHECK(nearest[0].trial_b == 1);
  CHECK(find_coincidences(d, CoincidenceWindow::of(0.1), MatchMode::SameTrialOnly).empty());
  const auto m = match_coincidences(d, CoincidenceWindow::of(0.1));
  CHECK_FALSE(m.trials[0].matched);
  CHECK_FALSE(m.trials[1].matched);
}

TEST_CASE("matching soundness and monotonicity on random streams") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 1 + gen() % 40;
    std::vector<double> ta(n), tb(n);
    for (auto& t : ta) t = u(gen);
    for (auto& t : tb) t = u(gen);
    const auto d = two_streams(ta, tb);
    std::size_t previous = 0;
    for (double w : {0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 50.0}) {
      const auto pairs = find_coincidences(d, CoincidenceWindow::of(w));
      std::set<std::size_t> used_a, used_b;
      for (const auto& p : pairs) {
        CHECK(std::abs(ta[p.trial_a] - tb[p.trial_b]) < w);
        CHECK(used_a.insert(p.trial_a).second);
        CHECK(used_b.insert(p.trial_b).second);
      }
      CHECK(pairs.size() >= previous);
      previous = pairs.size();
    }
  }
}

TEST_CASE("d = 0 time tags: matched fraction independent of settings") {
  ModelConfig cfg;
  cfg.kind = ModelKind::TimeTag;
  cfg.encoding = Encoding::Polarization;
  cfg.delay_exponent = 0.0;
  const std::uint64_t n = 60000;
  const auto w = CoincidenceWindow::of(0.1);
  std::vector<double> fractions;
  for (double delta : {0.0, pi / 8, pi / 4}) {
    const std::vector<Setting> s{Setting::planar("a", 0.0), Setting::planar("b", delta)};
    const auto d = run_experiment(cfg, s, Schedule::fixed({{"a", "b"}}), n, 13 + fractions.size());
    fractions.push_back(static_cast<double>(find_coincidences(d, w).size()) / n);
  }
  // Two independent uniform delays on [0,1): P(|x - y| < 0.1) = 0.19.
  for (double f : fractions) CHECK(std::abs(f - 0.19) < 5 * std::sqrt(0.19 * 0.81 / n));
  CHECK(std::abs(fractions[0] - fractions[2]) < 5 * std::sqrt(2 * 0.19 * 0.81 / n));
}

TEST_CASE("log window grid") {
  const auto g = log_window_grid(1e-4, 1.0, 30);
  CHECK(g.size() == 121);
  CHECK(g.front() == 1.0);
  CHECK(g.back() == doctest::Approx(1e-4));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] < g[i - 1]);
  CHECK(g[30] == doctest::Approx(0.1));
  CHECK_THROWS_AS(log_window_grid(0.0, 1.0), ConfigError);
}

namespace {

// Straightforward greedy pass over a merged, time-ordered event list.
std::vector<CoincidencePair> naive_match(const Dataset& d, double w, MatchMode mode) {
  std::vector<std::pair<double, std::size_t>> ta, tb;
  for (std::size_t i = 0; i < d.trials.size(); ++i) {
    ta.emplace_back(d.trials[i].event_a.time_tag, i);
    tb.emplace_back(d.trials[i].event_b.time_tag, i);
  }
  std::sort(ta.begin(), ta.end());
  std::sort(tb.begin(), tb.end());
  std::vector<CoincidencePair> out;
  std::size_t i = 0, j = 0;
  while (i < ta.size() && j < tb.size()) {
    if (std::abs(ta[i].first - tb[j].first) < w) {
      if (mode == MatchMode::Nearest || ta[i].second == tb[j].second) out.push_back({ta[i].second, tb[j].second});
      ++i;
      ++j;
    } else if (ta[i].first <= tb[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("a reused index matches a naive matcher at every width") {
  ModelConfig cfg;
  cfg.kind = ModelKind::TimeTag;
  const std::vector<Setting> s{Setting::planar("a", 0.0), Setting::planar("b", 1.0)};
  const auto d = run_experiment(cfg, s, Schedule::fixed({{"a", "b"}}), 5000, 12);
  const CoincidenceIndex index(d);
  for (double w : {1e-3, 1e-2, 0.3, 5.0, 50.0}) {
    for (auto mode : {MatchMode::Nearest, MatchMode::SameTrialOnly}) {
      const auto x = index.match(CoincidenceWindow::of(w), mode);
      const auto y = naive_match(d, w, mode);
      REQUIRE(x.size() == y.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(x[i].trial_a == y[i].trial_a);
        CHECK(x[i].trial_b == y[i].trial_b);
      }
    }
  }
}
