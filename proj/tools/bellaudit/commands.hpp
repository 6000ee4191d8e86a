#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace bellaudit::cli {

enum Exit : int { kOk = 0, kConfigError = 2, kDataError = 3 };

struct ModelFlags {
  std::string model = "quantum";
  std::string encoding = "spin";
  std::optional<double> delay_max;
  std::optional<double> delay_exponent;
  std::optional<double> base_interval;
};

struct SimulateFlags {
  ModelFlags model;
  std::string settings_path;  // empty: a,b,c at 0, 120, 240 degrees
  std::string schedule = "bell";
  bool random_schedule = false;
  std::uint64_t pairs = 10000;
  std::optional<std::uint64_t> seed;
  std::string window = "inf";
  std::string match = "nearest";
  std::string out;
  unsigned threads = 1;
};

struct AuditFlags {
  std::string in;
  std::string labels;  // "a,b,c"; default: first three settings
  std::optional<std::string> window;
  std::string match = "nearest";
  std::string builtin;
  std::string expr_path;
  bool anticorrelated = false;
  std::string out = "-";
};

struct BoundsFlags {
  std::string builtin;
  std::string expr_path;
  bool anticorrelated = false;
  std::string out = "-";
  unsigned threads = 1;
};

struct FeasibilityFlags {
  std::string corr;
  std::string in;
  std::string out = "-";
};

struct ScanFlags {
  ModelFlags model{"timetag", "polarization", {}, {}, {}};
  std::optional<double> delta;
  std::string settings_path;  // three settings: adds a Bell audit per window
  std::string windows = "inf,1e-4:1:log30";
  std::uint64_t pairs = 100000;
  std::optional<std::uint64_t> seed;
  bool regenerate = false;
  std::string match = "nearest";
  std::uint64_t min_matched = 10000;
  std::string out = "-";
  std::string summary;
  unsigned threads = 1;
};

struct ValidateFlags {
  std::string in;
  std::string out;
};

int cmd_simulate(const SimulateFlags& f);
int cmd_audit(const AuditFlags& f);
int cmd_bounds(const BoundsFlags& f);
int cmd_feasibility(const FeasibilityFlags& f);
int cmd_scan_window(const ScanFlags& f);
int cmd_validate(const ValidateFlags& f);

}  // namespace bellaudit::cli
