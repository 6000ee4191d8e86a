#include "bellaudit/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "bellaudit/errors.hpp"

namespace bellaudit {

char station_char(Station s) { return s == Station::A ? 'A' : 'B'; }

Setting::Setting(std::string label, std::array<double, 3> direction)
    : label_(std::move(label)), direction_(direction) {
  if (label_.empty()) throw ConfigError("setting label must not be empty");
  const double norm = std::sqrt(direction_[0] * direction_[0] + direction_[1] * direction_[1] +
                                direction_[2] * direction_[2]);
  if (!(std::abs(norm - 1.0) <= 1e-12)) {
    throw ConfigError("setting '" + label_ + "' direction is not a unit vector");
  }
}

Setting Setting::planar(std::string label, double angle) {
  return Setting(std::move(label), {std::cos(angle), std::sin(angle), 0.0});
}

double Setting::angle() const { return std::atan2(direction_[1], direction_[0]); }

double Setting::dot(const Setting& other) const {
  return direction_[0] * other.direction_[0] + direction_[1] * other.direction_[1] +
         direction_[2] * other.direction_[2];
}

Outcome::Outcome(int value) : value_(value) {
  if (value != 1 && value != -1) {
    throw DataError("outcome must be +1 or -1, got " + std::to_string(value));
  }
}

const Setting* Dataset::find_setting(const std::string& label) const {
  auto it = std::find_if(settings.begin(), settings.end(),
                         [&](const Setting& s) { return s.label() == label; });
  return it == settings.end() ? nullptr : &*it;
}

const Setting& Dataset::setting(const std::string& label) const {
  if (const Setting* s = find_setting(label)) return *s;
  throw ConfigError("unknown setting label '" + label + "'");
}

TrialRecord make_trial(std::uint64_t index, const std::string& setting_a, Outcome outcome_a,
                       double time_a, const std::string& setting_b, Outcome outcome_b,
                       double time_b, bool matched) {
  TrialRecord t;
  t.trial_index = index;
  t.event_a = StationEvent{{Station::A, index, time_a}, setting_a, outcome_a, time_a};
  t.event_b = StationEvent{{Station::B, index, time_b}, setting_b, outcome_b, time_b};
  t.matched = matched;
  return t;
}

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::LabelCollision: return "label collision";
    case Rule::DuplicateLabel: return "duplicate label";
    case Rule::StationMismatch: return "station mismatch";
    case Rule::IndexMismatch: return "index mismatch";
    case Rule::NegativeTime: return "negative time tag";
    case Rule::TimeTagMismatch: return "time tag mismatch";
    case Rule::UnknownSetting: return "unknown setting";
    case Rule::DuplicateSetting: return "duplicate setting";
    case Rule::Ordering: return "ordering";
  }
  return "?";
}

namespace {

using LabelKey = std::pair<Station, std::uint64_t>;

struct EventRef {
  std::uint64_t trial_index;
  const StationEvent* event;
};

}  // namespace

std::vector<Violation> validate_dataset(const Dataset& d) {
  std::vector<Violation> out;
  auto report = [&](std::uint64_t trial, Rule rule, std::string detail) {
    out.push_back(Violation{trial, rule, std::move(detail)});
  };

  std::set<std::string> seen_settings;
  for (const auto& s : d.settings) {
    if (!seen_settings.insert(s.label()).second) {
      report(kNoTrial, Rule::DuplicateSetting, "setting '" + s.label() + "' listed twice");
    }
  }

  std::map<LabelKey, std::vector<EventRef>> by_label;
  for (const auto& t : d.trials) {
    by_label[{t.event_a.label.station, t.event_a.label.trial_index}].push_back({t.trial_index, &t.event_a});
    by_label[{t.event_b.label.station, t.event_b.label.trial_index}].push_back({t.trial_index, &t.event_b});
  }

  // Events whose label is shared with another event. Collisions take
  // precedence over a per-event index mismatch so one mistake is one report.
  std::set<const StationEvent*> shared;
  for (const auto& [key, refs] : by_label) {
    if (refs.size() < 2) continue;
    const bool collision = std::any_of(refs.begin(), refs.end(), [&](const EventRef& r) {
      return r.event->setting != refs.front().event->setting;
    });
    const Rule rule = collision ? Rule::LabelCollision : Rule::DuplicateLabel;
    const std::string name = std::string("(") + station_char(key.first) + "," +
                             std::to_string(key.second) + ")";
    std::set<std::uint64_t> offenders;
    for (const auto& r : refs) {
      shared.insert(r.event);
      if (r.trial_index != key.second) offenders.insert(r.trial_index);
    }
    if (offenders.empty()) offenders.insert(key.second);
    for (auto trial : offenders) {
      report(trial, rule, "label " + name + (collision ? " bound to different settings" : " used twice"));
    }
  }

  auto check_event = [&](const TrialRecord& t, const StationEvent& e, Station expected) {
    if (e.label.station != expected) {
      report(t.trial_index, Rule::StationMismatch,
             std::string("event_") + (expected == Station::A ? 'a' : 'b') + " carries station " +
                 station_char(e.label.station));
    }
    if (e.label.trial_index != t.trial_index && !shared.count(&e)) {
      report(t.trial_index, Rule::IndexMismatch,
             "label index " + std::to_string(e.label.trial_index));
    }
    if (!(e.time_tag >= 0.0)) report(t.trial_index, Rule::NegativeTime, "time tag < 0");
    if (e.time_tag != e.label.time_tag) {
      report(t.trial_index, Rule::TimeTagMismatch, "event and label time tags differ");
    }
    if (!seen_settings.count(e.setting)) {
      report(t.trial_index, Rule::UnknownSetting, "setting '" + e.setting + "'");
    }
  };

  for (std::size_t i = 0; i < d.trials.size(); ++i) {
    const auto& t = d.trials[i];
    check_event(t, t.event_a, Station::A);
    check_event(t, t.event_b, Station::B);
    if (i > 0 && t.trial_index <= d.trials[i - 1].trial_index) {
      report(t.trial_index, Rule::Ordering, "trial indices not strictly increasing");
    }
  }

  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.trial_index, a.rule) < std::tie(b.trial_index, b.rule);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace bellaudit
