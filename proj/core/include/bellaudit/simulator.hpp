#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bellaudit/core_model.hpp"
#include "bellaudit/models.hpp"

namespace bellaudit {

using SettingPair = std::pair<std::string, std::string>;

/// Random setting-pair schedule: each trial draws one pair from `allowed`
/// uniformly, or takes the next entry of `explicit_pairs` (cycled) when given.
struct Schedule {
  std::vector<SettingPair> allowed;
  std::vector<SettingPair> explicit_pairs;

  static Schedule uniform(std::vector<SettingPair> allowed);
  static Schedule fixed(std::vector<SettingPair> pairs);
  /// (a,b), (a,c), (b,c) over the first three settings.
  static Schedule bell_triple(const std::vector<Setting>& settings);

  /// Throws ConfigError when a scheduled pair is outside `allowed` or a label
  /// is not among `settings`.
  void validate(const std::vector<Setting>& settings) const;
};

class CoincidenceWindow {
 public:
  static CoincidenceWindow infinite() { return CoincidenceWindow(); }
  /// Throws ConfigError unless width > 0.
  static CoincidenceWindow of(double width);

  bool is_infinite() const { return !width_; }
  double width() const;
  std::optional<double> as_optional() const { return width_; }

 private:
  CoincidenceWindow() = default;
  std::optional<double> width_;
};

struct RunOptions {
  unsigned threads = 1;
};

/// Emits n trials of the discrete space-time process. Trial k is emitted at
/// k * base_interval; each station's time tag is emission time plus its
/// model delay. All trials are marked matched (no filtering yet). The result
/// is bit-identical for equal inputs regardless of `opts.threads`.
Dataset run_experiment(const ModelConfig& model, const std::vector<Setting>& settings,
                       const Schedule& schedule, std::uint64_t n, std::uint64_t seed,
                       RunOptions opts = {});

enum class MatchMode {
  Nearest,         // pair by time; cross-trial pairs allowed
  SameTrialOnly,   // a time-nearest pair counts only when both events share a trial
};

struct CoincidencePair {
  std::size_t trial_a;  // position in Dataset::trials of the A event
  std::size_t trial_b;  // position of the B event
};

/// Greedy two-pointer matching over the time-sorted A and B streams: the
/// earlier unconsumed event is paired with the earliest unconsumed event of
/// the other station if |t_a - t_b| < W, otherwise it is dropped. With an
/// infinite window every trial pairs with itself.
std::vector<CoincidencePair> find_coincidences(const Dataset& d, const CoincidenceWindow& w,
                                               MatchMode mode = MatchMode::Nearest);

/// Time-sorted station streams of a dataset, built once and reused for
/// matching at many window widths.
class CoincidenceIndex {
 public:
  explicit CoincidenceIndex(const Dataset& d);
  std::vector<CoincidencePair> match(const CoincidenceWindow& w, MatchMode mode = MatchMode::Nearest) const;

 private:
  std::vector<std::size_t> a_, b_;  // trial positions sorted by time tag
  std::vector<double> ta_, tb_;     // time tags in that order
};

/// Copy of `d` with matched flags set: a trial is matched when its own A and
/// B events form a coincidence pair. Cross-trial pairs are reported by
/// find_coincidences only.
Dataset match_coincidences(const Dataset& d, const CoincidenceWindow& w,
                           MatchMode mode = MatchMode::Nearest);

/// Logarithmic grid from hi down to lo, `per_decade` points per decade,
/// both ends included.
std::vector<double> log_window_grid(double lo, double hi, int per_decade = 30);

}  // namespace bellaudit
