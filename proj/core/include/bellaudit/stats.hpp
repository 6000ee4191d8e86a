#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bellaudit/core_model.hpp"
#include "bellaudit/simulator.hpp"

namespace bellaudit {

struct PairCounts {
  std::uint64_t n_pp = 0;
  std::uint64_t n_pm = 0;
  std::uint64_t n_mp = 0;
  std::uint64_t n_mm = 0;

  std::uint64_t total() const { return n_pp + n_pm + n_mp + n_mm; }
  void add(Outcome a, Outcome b);
  PairCounts& operator+=(const PairCounts& o);
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// E = (n_pp + n_mm - n_pm - n_mp)/total, stderr = sqrt((1 - E^2)/total).
/// Throws DataError when total == 0.
Estimate estimate_correlation(const PairCounts& counts);

/// Totals below this trigger a small-sample warning.
inline constexpr std::uint64_t kSmallSampleTotal = 100;

/// Joint counts over matched trials with the given setting pair.
PairCounts count_pair(const Dataset& d, const std::string& setting_a, const std::string& setting_b);

/// Joint counts over coincidence pairs (which may cross trials), keyed by
/// the setting of each event.
PairCounts count_coincidences(const Dataset& d, const std::vector<CoincidencePair>& pairs,
                              const std::string& setting_a, const std::string& setting_b);

}  // namespace bellaudit
