#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bellaudit/core_model.hpp"

namespace bellaudit {

inline constexpr const char* kTrialCsvHeader =
    "trial_index,setting_a,angle_a,outcome_a,time_a,setting_b,angle_b,outcome_b,time_b,matched";

void write_csv(const Dataset& d, std::ostream& out);

/// Parses the trial CSV. `settings` supplies the directions (normally from the
/// sidecar); labels missing from it are reconstructed as planar settings from
/// the angle columns. Throws DataError naming the 1-based line on bad rows.
Dataset read_csv(std::istream& in, std::vector<Setting> settings = {});

/// Sidecar JSON: {seed, model, window, n_trials, settings:[{label,x,y,z}]}.
/// An infinite window is written as null.
std::string sidecar_json(const Dataset& d);
/// Fills metadata and settings of `d` from sidecar text.
void apply_sidecar(Dataset& d, const std::string& json_text);

/// Settings from JSON. Accepts either a bare array or an object with a
/// "settings" array; each entry has a label and either {x,y,z} or "angle".
std::vector<Setting> parse_settings_json(const std::string& json_text);

/// Convenience wrappers; ConfigError on unreadable paths.
std::string read_text_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& text);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);
void save_dataset(const Dataset& d, const std::filesystem::path& csv_path);
/// Reads CSV plus sidecar when it exists next to the CSV.
Dataset load_dataset(const std::filesystem::path& csv_path);

}  // namespace bellaudit
