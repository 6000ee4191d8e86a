#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bellaudit/feasibility.hpp"
#include "bellaudit/models.hpp"
#include "bellaudit/simulator.hpp"
#include "bellaudit/stats.hpp"

namespace bellaudit {

struct ScanOptions {
  /// Generate one dataset and re-filter it per window instead of
  /// regenerating for every window.
  bool reuse_dataset = true;
  MatchMode mode = MatchMode::Nearest;
  unsigned threads = 1;
};

struct ScanRow {
  double window = 0.0;  // +inf for no filtering
  double delta = 0.0;
  std::uint64_t n_matched = 0;
  double e = 0.0;         // NaN when nothing matched
  double std_error = 0.0;
};

/// Correlation of settings at angles 0 and `delta` versus coincidence window.
/// `windows` must be sorted descending. Throws ConfigError otherwise.
std::vector<ScanRow> window_scan(const ModelConfig& model, double delta, const std::vector<double>& windows,
                                 std::uint64_t n, std::uint64_t seed, const ScanOptions& opts = {});

/// Window-scan CSV: window,delta,n_matched,E,stderr.
std::string scan_csv(const std::vector<ScanRow>& rows);

struct BellScanRow {
  double window = 0.0;
  std::array<PairCounts, 3> counts;
  BellGameReport report;
};

/// Bell-sum audit per window on a uniform (a,b),(a,c),(b,c) schedule with
/// `n_per_pair * 3` trials.
std::vector<BellScanRow> bell_window_scan(const ModelConfig& model, const std::array<Setting, 3>& settings,
                                          const std::vector<double>& windows, std::uint64_t n_per_pair,
                                          std::uint64_t seed, const ScanOptions& opts = {});

/// Smallest window whose matched count is at least `min_matched`
/// (every pair, for the Bell scan). Returns the row index or -1.
long smallest_window_with(const std::vector<ScanRow>& rows, std::uint64_t min_matched);
long smallest_window_with(const std::vector<BellScanRow>& rows, std::uint64_t min_matched_per_pair);

}  // namespace bellaudit
