#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bellaudit::cli {

/// Splits "a,b,c"; empty fields are kept so callers can reject them.
std::vector<std::string> split(const std::string& text, char sep = ',');

double parse_double(const std::string& text, const std::string& what);

/// "inf" means no filtering.
double parse_window(const std::string& text);

/// Comma-separated entries, each a number, "inf", or "lo:hi:logK"
/// (K points per decade). Returned sorted descending without duplicates.
std::vector<double> parse_window_grid(const std::string& text);

/// Turns a JSON config object into command-line tokens. Keys are long option
/// names without the dashes; keys for which `known` is false are returned in
/// `skipped` instead.
std::vector<std::string> config_tokens(const std::string& json_text,
                                       const std::function<bool(const std::string&)>& known,
                                       std::vector<std::string>& skipped);

}  // namespace bellaudit::cli
