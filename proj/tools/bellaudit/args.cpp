#include "args.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "bellaudit/errors.hpp"
#include "bellaudit/simulator.hpp"

namespace bellaudit::cli {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError("bad " + what + " '" + text + "'");
  return v;
}

double parse_window(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  const double w = parse_double(text, "window");
  if (!(w > 0.0)) throw ConfigError("window must be positive, got '" + text + "'");
  return w;
}

std::vector<double> parse_window_grid(const std::string& text) {
  std::vector<double> grid;
  for (const auto& item : split(text)) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      grid.push_back(parse_window(item));
      continue;
    }
    if (parts.size() != 3 || parts[2].rfind("log", 0) != 0) {
      throw ConfigError("bad window range '" + item + "' (expected lo:hi:logK)");
    }
    const double lo = parse_window(parts[0]);
    const double hi = parse_window(parts[1]);
    const double k = parse_double(parts[2].substr(3), "points per decade");
    if (std::isinf(hi) || !(lo < hi) || k < 1 || k != std::floor(k)) {
      throw ConfigError("bad window range '" + item + "'");
    }
    const auto part = log_window_grid(lo, hi, static_cast<int>(k));
    grid.insert(grid.end(), part.begin(), part.end());
  }
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<std::string> config_tokens(const std::string& json_text,
                                       const std::function<bool(const std::string&)>& known,
                                       std::vector<std::string>& skipped) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  std::vector<std::string> tokens;
  for (const auto& [key, value] : j.items()) {
    if (key == "config") throw ConfigError("config files cannot include other configs");
    if (!known(key)) {
      skipped.push_back(key);
      continue;
    }
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back(flag);
    } else if (value.is_string()) {
      tokens.push_back(flag);
      tokens.push_back(value.get<std::string>());
    } else if (value.is_number_integer() || value.is_number_unsigned()) {
      tokens.push_back(flag);
      tokens.push_back(value.dump());
    } else if (value.is_number_float()) {
      // dump() prints the shortest round-tripping form
      tokens.push_back(flag);
      tokens.push_back(value.dump());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ",";
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      tokens.push_back(flag);
      tokens.push_back(joined);
    } else {
      throw ConfigError("config key '" + key + "' has an unsupported value");
    }
  }
  return tokens;
}

}  // namespace bellaudit::cli
