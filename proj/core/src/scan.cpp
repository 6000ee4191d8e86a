#include "bellaudit/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "bellaudit/errors.hpp"

namespace bellaudit {

namespace {

void check_descending(const std::vector<double>& windows) {
  if (windows.empty()) throw ConfigError("window grid is empty");
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!(windows[i] > 0.0)) throw ConfigError("windows must be > 0");
    if (i > 0 && !(windows[i] < windows[i - 1])) throw ConfigError("window grid must be sorted descending");
  }
}

CoincidenceWindow to_window(double w) {
  return std::isinf(w) ? CoincidenceWindow::infinite() : CoincidenceWindow::of(w);
}

std::uint64_t regen_seed(std::uint64_t seed, std::size_t k) { return mix64(seed + 0x51ED2701ULL * (k + 1)); }

// Runs job(k) for k in [0, count) on up to `threads` workers. Jobs write only
// their own slot, so results do not depend on the thread count.
template <class Job>
void for_each_window(std::size_t count, unsigned threads, Job job) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads == 1) {
    for (std::size_t k = 0; k < count; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          job(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<ScanRow> window_scan(const ModelConfig& model, double delta, const std::vector<double>& windows,
                                 std::uint64_t n, std::uint64_t seed, const ScanOptions& opts) {
  check_descending(windows);
  const std::vector<Setting> settings{Setting::planar("a", 0.0), Setting::planar("b", delta)};
  const Schedule schedule = Schedule::fixed({{"a", "b"}});
  const RunOptions run{opts.threads};

  Dataset shared;
  std::optional<CoincidenceIndex> index;
  if (opts.reuse_dataset) {
    shared = run_experiment(model, settings, schedule, n, seed, run);
    index.emplace(shared);
  }

  std::vector<ScanRow> rows(windows.size());
  for_each_window(windows.size(), opts.threads, [&](std::size_t k) {
    PairCounts c;
    if (opts.reuse_dataset) {
      c = count_coincidences(shared, index->match(to_window(windows[k]), opts.mode), "a", "b");
    } else {
      const Dataset d = run_experiment(model, settings, schedule, n, regen_seed(seed, k));
      c = count_coincidences(d, find_coincidences(d, to_window(windows[k]), opts.mode), "a", "b");
    }
    ScanRow row{windows[k], delta, c.total(), std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN()};
    if (c.total() > 0) {
      const auto est = estimate_correlation(c);
      row.e = est.value;
      row.std_error = est.std_error;
    }
    rows[k] = row;
  });
  return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string out = "window,delta,n_matched,E,stderr\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%llu,%.17g,%.17g\n", r.window, r.delta,
                  static_cast<unsigned long long>(r.n_matched), r.e, r.std_error);
    out += buf;
  }
  return out;
}

std::vector<BellScanRow> bell_window_scan(const ModelConfig& model, const std::array<Setting, 3>& settings,
                                          const std::vector<double>& windows, std::uint64_t n_per_pair,
                                          std::uint64_t seed, const ScanOptions& opts) {
  check_descending(windows);
  const std::vector<Setting> list(settings.begin(), settings.end());
  const Schedule schedule = Schedule::bell_triple(list);
  const std::array<std::string, 3> labels{settings[0].label(), settings[1].label(), settings[2].label()};
  const RunOptions run{opts.threads};
  const std::uint64_t n = 3 * n_per_pair;

  Dataset shared;
  std::optional<CoincidenceIndex> index;
  if (opts.reuse_dataset) {
    shared = run_experiment(model, list, schedule, n, seed, run);
    index.emplace(shared);
  }

  std::vector<BellScanRow> rows(windows.size());
  for_each_window(windows.size(), opts.threads, [&](std::size_t k) {
    const auto w = to_window(windows[k]);
    Dataset fresh;
    if (!opts.reuse_dataset) fresh = run_experiment(model, list, schedule, n, regen_seed(seed, k));
    const Dataset& d = opts.reuse_dataset ? shared : fresh;
    const auto pairs = opts.reuse_dataset ? index->match(w, opts.mode) : find_coincidences(d, w, opts.mode);
    BellScanRow row;
    row.window = windows[k];
    row.counts = {count_coincidences(d, pairs, labels[0], labels[1]),
                  count_coincidences(d, pairs, labels[0], labels[2]),
                  count_coincidences(d, pairs, labels[1], labels[2])};
    if (row.counts[0].total() && row.counts[1].total() && row.counts[2].total()) {
      row.report = bell_game_report(labels, row.counts);
    } else {
      row.report.labels = labels;
      row.report.counts = row.counts;
      row.report.bell_sum = std::numeric_limits<double>::quiet_NaN();
      row.report.message = "not enough coincidences for every setting pair";
    }
    rows[k] = std::move(row);
  });
  return rows;
}

long smallest_window_with(const std::vector<ScanRow>& rows, std::uint64_t min_matched) {
  long best = -1;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].n_matched >= min_matched && (best < 0 || rows[i].window < rows[best].window)) {
      best = static_cast<long>(i);
    }
  }
  return best;
}

long smallest_window_with(const std::vector<BellScanRow>& rows, std::uint64_t min_matched_per_pair) {
  long best = -1;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bool ok = true;
    for (const auto& c : rows[i].counts) ok = ok && c.total() >= min_matched_per_pair;
    if (ok && (best < 0 || rows[i].window < rows[best].window)) best = static_cast<long>(i);
  }
  return best;
}

}  // namespace bellaudit
