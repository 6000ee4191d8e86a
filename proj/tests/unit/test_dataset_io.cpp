#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "bellaudit/dataset_io.hpp"
#include "bellaudit/errors.hpp"
#include "bellaudit/simulator.hpp"

using namespace bellaudit;

TEST_CASE("csv header is exact") {
  Dataset d;
  d.settings = {Setting::planar("a", 0.0)};
  std::ostringstream os;
  write_csv(d, os);
  CHECK(os.str() == "trial_index,setting_a,angle_a,outcome_a,time_a,setting_b,angle_b,outcome_b,time_b,matched\n");
}

TEST_CASE("csv + sidecar round trip") {
  ModelConfig cfg;
  cfg.kind = ModelKind::TimeTag;
  cfg.encoding = Encoding::Polarization;
  const std::vector<Setting> settings{Setting::planar("a", 0.0), Setting::planar("b", std::numbers::pi / 3),
                                      Setting("c", {0.0, 0.6, 0.8})};
  auto d = run_experiment(cfg, settings, Schedule::bell_triple(settings), 500, 42);
  d = match_coincidences(d, CoincidenceWindow::of(0.05));

  std::ostringstream os;
  write_csv(d, os);
  std::istringstream is(os.str());
  Dataset back;
  apply_sidecar(back, sidecar_json(d));
  Dataset r = read_csv(is, back.settings);
  r.metadata = back.metadata;

  REQUIRE(r.trials.size() == d.trials.size());
  CHECK(r.metadata.seed == 42);
  CHECK(r.metadata.model == "timetag");
  REQUIRE(r.metadata.window.has_value());
  CHECK(*r.metadata.window == 0.05);
  REQUIRE(r.settings.size() == 3);
  CHECK(r.settings[2].direction()[2] == doctest::Approx(0.8).epsilon(1e-15));
  for (std::size_t i = 0; i < d.trials.size(); ++i) {
    const auto& x = d.trials[i];
    const auto& y = r.trials[i];
    CHECK(x.trial_index == y.trial_index);
    CHECK(x.matched == y.matched);
    CHECK(x.event_a.setting == y.event_a.setting);
    CHECK(x.event_b.setting == y.event_b.setting);
    CHECK(x.event_a.outcome == y.event_a.outcome);
    CHECK(x.event_b.outcome == y.event_b.outcome);
    CHECK(std::abs(x.event_a.time_tag - y.event_a.time_tag) < 1e-9);
    CHECK(std::abs(x.event_b.time_tag - y.event_b.time_tag) < 1e-9);
    CHECK(y.event_a.label == x.event_a.label);
  }
  CHECK(validate_dataset(r).empty());
}

TEST_CASE("infinite window is null in the sidecar") {
  Dataset d;
  d.settings = {Setting::planar("a", 0.0)};
  CHECK(sidecar_json(d).find("\"window\": null") != std::string::npos);
}

TEST_CASE("corrupted rows name the line") {
  const std::string header = std::string(kTrialCsvHeader) + "\n";
  auto expect_row = [&](const std::string& body, const std::string& needle) {
    std::istringstream is(header + body);
    try {
      read_csv(is);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_row("0,a,0,1,0,b,1,-1,0,true\n1,a,0,0,10,b,1,-1,10,true\n", "row 3");
  expect_row("0,a,0,1,0,b,1,-1,0\n", "row 2");
  expect_row("0,a,0,1,0,b,1,-1,0,yes\n", "matched");
  expect_row("x,a,0,1,0,b,1,-1,0,true\n", "trial_index");
  std::istringstream bad("trial,whatever\n");
  CHECK_THROWS_AS(read_csv(bad), DataError);
}

TEST_CASE("settings json accepts vectors and angles") {
  const auto s = parse_settings_json(R"({"settings":[{"label":"a","x":1,"y":0,"z":0},{"label":"b","angle":1.5}]})");
  REQUIRE(s.size() == 2);
  CHECK(s[1].angle() == doctest::Approx(1.5));
  CHECK(parse_settings_json(R"([{"label":"q","angle":0}])").size() == 1);
  CHECK_THROWS_AS(parse_settings_json(R"([{"label":"q","x":2,"y":0,"z":0}])"), ConfigError);
  CHECK_THROWS_AS(parse_settings_json("{not json"), ConfigError);
}
