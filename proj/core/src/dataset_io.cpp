#include "bellaudit/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "bellaudit/errors.hpp"

namespace bellaudit {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_row(std::size_t line_no, const std::string& why) {
  throw DataError("row " + std::to_string(line_no) + ": " + why);
}

std::uint64_t parse_index(std::string_view s, std::size_t line_no) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) bad_row(line_no, "bad trial_index '" + std::string(s) + "'");
  return v;
}

double parse_real(std::string_view s, std::size_t line_no, const char* what) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    bad_row(line_no, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

Outcome parse_outcome(std::string_view s, std::size_t line_no) {
  if (s == "1" || s == "+1") return Outcome::plus();
  if (s == "-1") return Outcome::minus();
  bad_row(line_no, "outcome must be 1 or -1, got '" + std::string(s) + "'");
}

bool parse_bool(std::string_view s, std::size_t line_no) {
  if (s == "true") return true;
  if (s == "false") return false;
  bad_row(line_no, "matched must be true or false, got '" + std::string(s) + "'");
}

Setting setting_from_json(const json& j) {
  if (!j.contains("label")) throw ConfigError("setting entry without label");
  auto label = j.at("label").get<std::string>();
  if (j.contains("x")) {
    return Setting(label, {j.at("x").get<double>(), j.at("y").get<double>(),
                           j.value("z", 0.0)});
  }
  if (j.contains("angle")) return Setting::planar(label, j.at("angle").get<double>());
  throw ConfigError("setting '" + label + "' needs x,y,z or angle");
}

}  // namespace

void write_csv(const Dataset& d, std::ostream& out) {
  out << kTrialCsvHeader << '\n';
  for (const auto& t : d.trials) {
    const auto& a = t.event_a;
    const auto& b = t.event_b;
    out << t.trial_index << ',' << a.setting << ',' << fmt_double(d.setting(a.setting).angle()) << ','
        << a.outcome.value() << ',' << fmt_double(a.time_tag) << ',' << b.setting << ','
        << fmt_double(d.setting(b.setting).angle()) << ',' << b.outcome.value() << ','
        << fmt_double(b.time_tag) << ',' << (t.matched ? "true" : "false") << '\n';
  }
}

Dataset read_csv(std::istream& in, std::vector<Setting> settings) {
  Dataset d;
  d.settings = std::move(settings);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError("row 1: empty trial CSV");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrialCsvHeader) throw DataError("row 1: unexpected header '" + line + "'");

  auto ensure_setting = [&](std::string_view label, double angle, std::size_t ln) {
    if (label.empty()) bad_row(ln, "empty setting label");
    if (!d.find_setting(std::string(label))) d.settings.push_back(Setting::planar(std::string(label), angle));
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 10) bad_row(line_no, "expected 10 fields, got " + std::to_string(f.size()));
    TrialRecord t;
    t.trial_index = parse_index(f[0], line_no);
    const double angle_a = parse_real(f[2], line_no, "angle_a");
    const double time_a = parse_real(f[4], line_no, "time_a");
    const double angle_b = parse_real(f[6], line_no, "angle_b");
    const double time_b = parse_real(f[8], line_no, "time_b");
    ensure_setting(f[1], angle_a, line_no);
    ensure_setting(f[5], angle_b, line_no);
    t = make_trial(t.trial_index, std::string(f[1]), parse_outcome(f[3], line_no), time_a,
                   std::string(f[5]), parse_outcome(f[7], line_no), time_b,
                   parse_bool(f[9], line_no));
    d.trials.push_back(std::move(t));
  }
  return d;
}

std::string sidecar_json(const Dataset& d) {
  json j;
  j["seed"] = d.metadata.seed;
  j["model"] = d.metadata.model;
  j["window"] = d.metadata.window ? json(*d.metadata.window) : json(nullptr);
  j["n_trials"] = d.trials.size();
  json settings = json::array();
  for (const auto& s : d.settings) {
    const auto& v = s.direction();
    settings.push_back({{"label", s.label()}, {"x", v[0]}, {"y", v[1]}, {"z", v[2]}});
  }
  j["settings"] = std::move(settings);
  return j.dump(2) + "\n";
}

void apply_sidecar(Dataset& d, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
    d.metadata.seed = j.value("seed", std::uint64_t{0});
    d.metadata.model = j.value("model", std::string());
    if (j.contains("window") && !j["window"].is_null()) {
      d.metadata.window = j["window"].get<double>();
    } else {
      d.metadata.window.reset();
    }
    if (j.contains("settings")) d.settings = parse_settings_json(json_text);
  } catch (const json::exception& e) {
    throw DataError(std::string("sidecar: ") + e.what());
  }
}

std::vector<Setting> parse_settings_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("settings JSON: ") + e.what());
  }
  const json& arr = j.is_array() ? j : j.contains("settings") ? j["settings"] : j;
  if (!arr.is_array()) throw ConfigError("settings JSON must hold an array of settings");
  std::vector<Setting> out;
  try {
    for (const auto& e : arr) out.push_back(setting_from_json(e));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("settings JSON: ") + e.what());
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw ConfigError("write failed for '" + p.string() + "'");
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

void save_dataset(const Dataset& d, const std::filesystem::path& csv_path) {
  std::ostringstream ss;
  write_csv(d, ss);
  write_text_file(csv_path, ss.str());
  write_text_file(sidecar_path(csv_path), sidecar_json(d));
}

Dataset load_dataset(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + csv_path.string() + "'");
  Dataset meta;
  const auto side = sidecar_path(csv_path);
  if (side != csv_path && std::filesystem::exists(side)) apply_sidecar(meta, read_text_file(side));
  Dataset d = read_csv(in, meta.settings);
  d.metadata = meta.metadata;
  return d;
}

}  // namespace bellaudit
