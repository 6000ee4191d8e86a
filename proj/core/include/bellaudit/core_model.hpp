#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace bellaudit {

enum class Station : std::uint8_t { A, B };

char station_char(Station s);

/// A measurement setting: symbolic label plus unit direction in 3-space.
/// Two settings compare equal when their labels match; the direction is
/// carried along for the samplers.
class Setting {
 public:
  Setting(std::string label, std::array<double, 3> direction);

  /// Unit vector in the xy-plane at `angle` radians from the x axis.
  static Setting planar(std::string label, double angle);

  const std::string& label() const { return label_; }
  const std::array<double, 3>& direction() const { return direction_; }
  /// atan2(y, x); the samplers that work with angles use this.
  double angle() const;
  double dot(const Setting& other) const;

  friend bool operator==(const Setting& a, const Setting& b) { return a.label_ == b.label_; }

 private:
  std::string label_;
  std::array<double, 3> direction_;
};

/// Strictly two-valued outcome.
class Outcome {
 public:
  explicit Outcome(int value);
  static Outcome plus() { return Outcome(1); }
  static Outcome minus() { return Outcome(-1); }
  /// sign(x) with the tie x == 0 resolved to +1.
  static Outcome sign_of(double x) { return x >= 0.0 ? plus() : minus(); }

  int value() const { return value_; }
  Outcome operator-() const { return Outcome(-value_); }
  friend bool operator==(Outcome, Outcome) = default;

 private:
  int value_;
};

struct SpaceTimeLabel {
  Station station = Station::A;
  std::uint64_t trial_index = 0;
  double time_tag = 0.0;  // simulated seconds

  friend bool operator==(const SpaceTimeLabel&, const SpaceTimeLabel&) = default;
};

struct StationEvent {
  SpaceTimeLabel label;
  std::string setting;  // label into Dataset::settings
  Outcome outcome = Outcome::plus();
  double time_tag = 0.0;
};

struct TrialRecord {
  std::uint64_t trial_index = 0;
  StationEvent event_a;
  StationEvent event_b;
  bool matched = false;
};

struct DatasetMetadata {
  std::uint64_t seed = 0;
  std::string model;
  /// Coincidence window in seconds; nullopt means infinite (no filtering).
  std::optional<double> window;
};

struct Dataset {
  std::vector<TrialRecord> trials;
  std::vector<Setting> settings;
  DatasetMetadata metadata;

  /// Throws ConfigError when the label is unknown.
  const Setting& setting(const std::string& label) const;
  const Setting* find_setting(const std::string& label) const;
};

/// Builds a trial whose two events are labeled consistently with `index`.
TrialRecord make_trial(std::uint64_t index, const std::string& setting_a, Outcome outcome_a,
                       double time_a, const std::string& setting_b, Outcome outcome_b,
                       double time_b, bool matched = true);

enum class Rule {
  LabelCollision,
  DuplicateLabel,
  StationMismatch,
  IndexMismatch,
  NegativeTime,
  TimeTagMismatch,
  UnknownSetting,
  DuplicateSetting,
  Ordering,
};

const char* rule_name(Rule r);

/// trial_index of violations that concern the settings list, not a trial.
inline constexpr std::uint64_t kNoTrial = std::numeric_limits<std::uint64_t>::max();

struct Violation {
  std::uint64_t trial_index = 0;
  Rule rule = Rule::LabelCollision;
  std::string detail;

  friend bool operator==(const Violation& a, const Violation& b) {
    return a.trial_index == b.trial_index && a.rule == b.rule;
  }
};

/// Checks every dataset invariant. Violations are returned as data, sorted by
/// (trial_index, rule); an empty result means the dataset is well formed.
std::vector<Violation> validate_dataset(const Dataset& d);

}  // namespace bellaudit
