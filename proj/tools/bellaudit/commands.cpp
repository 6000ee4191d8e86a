#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "args.hpp"
#include "bellaudit/algebra.hpp"
#include "bellaudit/dataset_io.hpp"
#include "bellaudit/errors.hpp"
#include "bellaudit/feasibility.hpp"
#include "bellaudit/scan.hpp"
#include "bellaudit/simulator.hpp"
#include "bellaudit/stats.hpp"

namespace bellaudit::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void require_readable(const std::string& path) {
  if (path.empty()) return;
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw ConfigError("cannot read '" + path + "'");
}

void require_writable(const std::string& path) {
  if (path.empty() || path == "-") return;
  const auto dir = fs::path(path).parent_path();
  std::error_code ec;
  if (!dir.empty() && !fs::is_directory(dir, ec)) {
    throw ConfigError("output directory '" + dir.string() + "' does not exist");
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << std::flush;
  } else if (!path.empty()) {
    write_text_file(path, text);
  }
}

ModelConfig model_config(const ModelFlags& f) {
  ModelConfig m;
  m.kind = parse_model_kind(f.model);
  m.encoding = parse_encoding(f.encoding);
  if (f.delay_max) m.delay_max = *f.delay_max;
  if (f.delay_exponent) m.delay_exponent = *f.delay_exponent;
  if (f.base_interval) m.base_interval = *f.base_interval;
  m.validate();
  return m;
}

std::vector<Setting> default_settings() {
  using std::numbers::pi;
  return {Setting::planar("a", 0.0), Setting::planar("b", 2 * pi / 3), Setting::planar("c", 4 * pi / 3)};
}

std::vector<Setting> load_settings(const std::string& path) {
  if (path.empty()) return default_settings();
  return parse_settings_json(read_text_file(path));
}

MatchMode parse_match(const std::string& s) {
  if (s == "nearest") return MatchMode::Nearest;
  if (s == "same-trial") return MatchMode::SameTrialOnly;
  throw ConfigError("unknown match mode '" + s + "' (nearest, same-trial)");
}

CoincidenceWindow window_of(double w) { return std::isinf(w) ? CoincidenceWindow::infinite() : CoincidenceWindow::of(w); }

std::vector<SettingPair> schedule_pairs(const std::string& spec, const std::vector<Setting>& s) {
  std::vector<SettingPair> pairs;
  if (spec == "bell") {
    if (s.size() < 3) throw ConfigError("schedule 'bell' needs three settings");
    pairs = {{s[0].label(), s[1].label()}, {s[0].label(), s[2].label()}, {s[1].label(), s[2].label()}};
  } else if (spec == "all") {
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j) pairs.emplace_back(s[i].label(), s[j].label());
  } else if (spec == "full") {
    for (const auto& a : s)
      for (const auto& b : s) pairs.emplace_back(a.label(), b.label());
  } else {
    for (const auto& item : split(spec)) {
      const auto ab = split(item, ':');
      if (ab.size() != 2 || ab[0].empty() || ab[1].empty()) {
        throw ConfigError("bad schedule entry '" + item + "' (expected a:b)");
      }
      pairs.emplace_back(ab[0], ab[1]);
    }
  }
  if (pairs.empty()) throw ConfigError("schedule '" + spec + "' yields no setting pairs");
  return pairs;
}

json rational_json(const Rational& r) {
  if (r.denominator() == 1) return r.numerator();
  return to_string(r);
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json window_json(double w) { return std::isinf(w) ? json(nullptr) : json(w); }

std::string atom_name(std::size_t atom, int k) {
  std::string s;
  for (int i = 0; i < k; ++i) s += ((atom >> i) & 1) ? '-' : '+';
  return s;
}

json lp_json(const LpResult& lp, int k) {
  json j;
  j["verdict"] = verdict_name(lp.verdict);
  j["infeasibility"] = lp.infeasibility;
  if (lp.witness) {
    json atoms = json::array();
    for (std::size_t a = 0; a < lp.witness->size(); ++a) {
      const double p = (*lp.witness)[a];
      if (p > 1e-12) atoms.push_back({{"atom", atom_name(a, k)}, {"p", p}});
    }
    j["witness"] = atoms;
  } else {
    j["witness"] = nullptr;
  }
  if (lp.certificate) {
    json pairs = json::array();
    for (const auto& [ij, y] : lp.certificate->pair_coeffs) pairs.push_back({{"i", ij.first}, {"j", ij.second}, {"coeff", y}});
    json singles = json::array();
    for (const auto& [i, y] : lp.certificate->single_coeffs) singles.push_back({{"i", i}, {"coeff", y}});
    j["certificate"] = {{"constant", lp.certificate->constant},
                        {"pairs", pairs},
                        {"singles", singles},
                        {"observed", lp.certificate->observed},
                        {"text", lp.certificate->text}};
  } else {
    j["certificate"] = nullptr;
  }
  return j;
}

json closed_form_json(const ClosedFormResult& c) {
  return {{"verdict", verdict_name(c.verdict)}, {"slacks", c.slacks}, {"violated", c.violated}};
}

json pair_json(const std::string& a, const std::string& b, const PairCounts& c) {
  json j{{"a", a}, {"b", b}, {"n", c.total()}, {"n_pp", c.n_pp}, {"n_pm", c.n_pm}, {"n_mp", c.n_mp}, {"n_mm", c.n_mm}};
  if (c.total()) {
    const auto e = estimate_correlation(c);
    j["E"] = e.value;
    j["stderr"] = e.std_error;
  } else {
    j["E"] = nullptr;
    j["stderr"] = nullptr;
  }
  return j;
}

json bell_json(const BellGameReport& r) {
  const auto& l = r.labels;
  json j;
  j["pairs"] = {pair_json(l[0], l[1], r.counts[0]), pair_json(l[0], l[2], r.counts[1]),
                pair_json(l[1], l[2], r.counts[2])};
  j["bell_sum"] = number_or_null(r.bell_sum);
  j["bell_sum_stderr"] = number_or_null(r.bell_sum_stderr);
  if (!std::isfinite(r.bell_sum)) {
    j["verdict"] = nullptr;
    j["message"] = r.message;
    return j;
  }
  j["closed_form"] = closed_form_json(r.closed_form);
  j["lp"] = lp_json(r.lp, 3);
  j["verdict"] = verdict_name(r.verdict);
  j["message"] = r.message;
  return j;
}

void warn_small(const std::string& what, std::uint64_t n) {
  if (n < kSmallSampleTotal) {
    std::cerr << "warning: only " << n << " matched trials for " << what
              << "; the normal-approximation error bar is unreliable\n";
  }
}

/// Prints violations with their CSV line numbers (header is line 1).
void report_violations(const Dataset& d, const std::vector<Violation>& v) {
  std::map<std::uint64_t, std::size_t> row_of;
  for (std::size_t i = 0; i < d.trials.size(); ++i) row_of.emplace(d.trials[i].trial_index, i + 2);
  for (const auto& x : v) {
    if (x.trial_index == kNoTrial) {
      std::cerr << "dataset: ";
    } else if (auto it = row_of.find(x.trial_index); it != row_of.end()) {
      std::cerr << "row " << it->second << " (trial " << x.trial_index << "): ";
    } else {
      std::cerr << "trial " << x.trial_index << ": ";
    }
    std::cerr << rule_name(x.rule) << ": " << x.detail << "\n";
  }
}

Expression load_expression(const std::string& builtin, const std::string& path) {
  if (!builtin.empty() && !path.empty()) throw ConfigError("give either --builtin or --expr, not both");
  if (!builtin.empty()) return builtin_expression(builtin);
  if (path.empty()) throw ConfigError("an expression is required (--builtin or --expr)");
  return expression_from_json(read_text_file(path));
}

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

}  // namespace

int cmd_simulate(const SimulateFlags& f) {
  if (!f.seed) throw ConfigError("--seed is required");
  if (f.out.empty()) throw ConfigError("--out is required (use - for stdout)");
  require_readable(f.settings_path);
  require_writable(f.out);
  if (f.pairs == 0) throw ConfigError("--pairs must be positive");

  const ModelConfig model = model_config(f.model);
  const auto settings = load_settings(f.settings_path);
  const auto pairs = schedule_pairs(f.schedule, settings);
  const Schedule schedule = f.random_schedule ? Schedule::uniform(pairs) : Schedule::fixed(pairs);
  const double w = parse_window(f.window);
  const auto mode = parse_match(f.match);

  Dataset d = run_experiment(model, settings, schedule, f.pairs * pairs.size(), *f.seed, RunOptions{f.threads});
  if (!std::isinf(w)) d = match_coincidences(d, CoincidenceWindow::of(w), mode);

  std::uint64_t matched = 0;
  for (const auto& t : d.trials) matched += t.matched;
  std::cerr << "simulated " << d.trials.size() << " trials (" << model_name(model.kind) << ", "
            << encoding_name(model.encoding) << ", seed " << *f.seed << ")\n";
  std::cerr << "window " << (std::isinf(w) ? std::string("inf") : fmt(w)) << ": matched " << matched << " of "
            << d.trials.size() << " (" << fmt(static_cast<double>(matched) / d.trials.size(), 4) << ")\n";
  for (const auto& [a, b] : pairs) warn_small(a + "," + b, count_pair(d, a, b).total());

  if (f.out == "-") {
    write_csv(d, std::cout);
    std::cout.flush();
  } else {
    save_dataset(d, f.out);
    std::cerr << "wrote " << f.out << " and " << sidecar_path(f.out).string() << "\n";
  }
  return kOk;
}

int cmd_validate(const ValidateFlags& f) {
  require_readable(f.in);
  require_writable(f.out);
  const Dataset d = load_dataset(f.in);
  const auto v = validate_dataset(d);
  if (!f.out.empty()) {
    json arr = json::array();
    for (const auto& x : v) {
      arr.push_back({{"trial_index", x.trial_index == kNoTrial ? json(nullptr) : json(x.trial_index)},
                     {"rule", rule_name(x.rule)},
                     {"detail", x.detail}});
    }
    emit(f.out, json{{"input", f.in}, {"n_trials", d.trials.size()}, {"violations", arr}}.dump(2) + "\n");
  }
  if (!v.empty()) {
    report_violations(d, v);
    std::cerr << f.in << ": " << v.size() << " violation(s)\n";
    return kDataError;
  }
  std::cerr << f.in << ": " << d.trials.size() << " trials, no violations\n";
  return kOk;
}

int cmd_audit(const AuditFlags& f) {
  require_readable(f.in);
  require_readable(f.expr_path);
  require_writable(f.out);
  Dataset d = load_dataset(f.in);
  if (const auto v = validate_dataset(d); !v.empty()) {
    report_violations(d, v);
    std::cerr << f.in << ": " << v.size() << " violation(s); not audited\n";
    return kDataError;
  }
  if (f.window) d = match_coincidences(d, window_of(parse_window(*f.window)), parse_match(f.match));

  std::optional<std::array<std::string, 3>> labels;
  if (!f.labels.empty()) {
    const auto l = split(f.labels);
    if (l.size() != 3) throw ConfigError("--labels needs three setting labels");
    labels = std::array<std::string, 3>{l[0], l[1], l[2]};
  }
  const auto report = bell_game_report(d, labels);

  std::uint64_t matched = 0;
  for (const auto& t : d.trials) matched += t.matched;
  json j;
  j["input"] = f.in;
  j["n_trials"] = d.trials.size();
  j["n_matched"] = matched;
  j["window"] = d.metadata.window ? json(*d.metadata.window) : json(nullptr);
  j.update(bell_json(report));

  if (!f.builtin.empty() || !f.expr_path.empty()) {
    const Expression e = load_expression(f.builtin, f.expr_path);
    const auto ev = evaluate_on_dataset(e, d, Binding{f.anticorrelated, false});
    json terms = json::array();
    for (const auto& t : ev.terms) {
      terms.push_back({{"a", t.setting_a},
                       {"b", t.setting_b},
                       {"sign", t.sign},
                       {"n", t.counts.total()},
                       {"E", t.estimate.value},
                       {"stderr", t.estimate.std_error},
                       {"contribution", t.contribution}});
    }
    j["expression"] = {{"text", to_string(e)}, {"terms", terms}, {"value", ev.value}, {"stderr", ev.std_error}};
  }

  const auto& l = report.labels;
  const std::array<std::string, 3> names{l[0] + "," + l[1], l[0] + "," + l[2], l[1] + "," + l[2]};
  for (int p = 0; p < 3; ++p) warn_small(names[p], report.counts[p].total());
  std::cerr << "matched " << matched << " of " << d.trials.size() << "; Bell sum " << fmt(report.bell_sum) << " +- "
            << fmt(report.bell_sum_stderr, 3) << "; " << verdict_name(report.verdict) << "\n";
  emit(f.out, j.dump(2) + "\n");
  return kOk;
}

int cmd_bounds(const BoundsFlags& f) {
  require_readable(f.expr_path);
  require_writable(f.out);
  const Expression e = load_expression(f.builtin, f.expr_path);
  const ConstraintSet c{f.anticorrelated};
  const Bounds b = tight_bounds(e, c, f.threads);
  const auto cyc = has_cyclicity(e, c);

  json j;
  j["expression"] = to_string(e);
  j["anticorrelated"] = f.anticorrelated;
  j["min"] = rational_json(b.min);
  j["max"] = rational_json(b.max);
  j["trivial_min"] = rational_json(-cyc.trivial);
  j["trivial_max"] = rational_json(cyc.trivial);
  j["cyclic"] = cyc.cyclic;
  if (cyc.witness) {
    json w = json::array();
    for (const auto& v : *cyc.witness) w.push_back(to_string(v));
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  if (e.stated_bound) {
    const bool ge = e.comparison == Comparison::GreaterEqual;
    j["stated_bound"] = rational_json(*e.stated_bound);
    j["stated_bound_tight"] = ge ? b.min == *e.stated_bound : b.max == *e.stated_bound;
    j["stated_bound_valid"] = ge ? b.min >= *e.stated_bound : b.max <= *e.stated_bound;
  }
  std::cerr << to_string(e) << "\n  range [" << to_string(b.min) << ", " << to_string(b.max) << "], trivial +-"
            << to_string(cyc.trivial) << (cyc.cyclic ? ", cyclic" : ", no cyclicity") << "\n";
  emit(f.out, j.dump(2) + "\n");
  return kOk;
}

namespace {

CorrelationSet correlation_input(const FeasibilityFlags& f) {
  if (!f.corr.empty() && !f.in.empty()) throw ConfigError("give either --corr or --in, not both");
  if (!f.corr.empty()) {
    const auto v = split(f.corr);
    if (v.size() != 3) throw ConfigError("--corr takes three values E01,E02,E12");
    return CorrelationSet::triple(parse_double(v[0], "correlation"), parse_double(v[1], "correlation"),
                                  parse_double(v[2], "correlation"));
  }
  if (f.in.empty()) throw ConfigError("correlations are required (--corr or --in)");
  CorrelationSet c;
  try {
    const auto j = json::parse(read_text_file(f.in));
    c.k = j.at("k").get<int>();
    for (const auto& p : j.value("pairs", json::array())) {
      c.set_pair(p.at("i").get<int>(), p.at("j").get<int>(), p.at("e").get<double>());
    }
    for (const auto& s : j.value("singles", json::array())) c.singles[s.at("i").get<int>()] = s.at("e").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(f.in + ": " + e.what());
  }
  c.validate();
  return c;
}

}  // namespace

int cmd_feasibility(const FeasibilityFlags& f) {
  require_readable(f.in);
  require_writable(f.out);
  const CorrelationSet c = correlation_input(f);
  const LpResult lp = feasible_lp(c);

  json j;
  j["k"] = c.k;
  j["verdict"] = verdict_name(lp.verdict);
  if (c.k == 3 && c.singles.empty() && c.pairs.size() == 3) {
    const auto cf = feasible_closed_form_3(c);
    j["closed_form"] = closed_form_json(cf);
    j["violated"] = cf.violated;
  }
  j["lp"] = lp_json(lp, c.k);
  std::cerr << "k = " << c.k << ": " << verdict_name(lp.verdict);
  if (lp.certificate) std::cerr << " (" << lp.certificate->text << ")";
  std::cerr << "\n";
  emit(f.out, j.dump(2) + "\n");
  return kOk;
}

int cmd_scan_window(const ScanFlags& f) {
  if (!f.seed) throw ConfigError("--seed is required");
  if (!f.delta && f.settings_path.empty()) throw ConfigError("give --delta, --settings, or both");
  require_readable(f.settings_path);
  require_writable(f.out);
  require_writable(f.summary);
  if (f.pairs == 0) throw ConfigError("--pairs must be positive");

  const ModelConfig model = model_config(f.model);
  const auto grid = parse_window_grid(f.windows);
  ScanOptions opts;
  opts.reuse_dataset = !f.regenerate;
  opts.mode = parse_match(f.match);
  opts.threads = f.threads;

  json summary;
  summary["model"] = model_name(model.kind);
  summary["encoding"] = encoding_name(model.encoding);
  summary["delay_max"] = model.delay_max;
  summary["delay_exponent"] = model.delay_exponent;
  summary["pairs"] = f.pairs;
  summary["seed"] = *f.seed;

  std::string csv;
  if (f.delta) {
    const auto rows = window_scan(model, *f.delta, grid, f.pairs, *f.seed, opts);
    csv = scan_csv(rows);
    long lo = -1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].n_matched >= kSmallSampleTotal && std::isfinite(rows[i].e) && (lo < 0 || rows[i].e < rows[lo].e)) {
        lo = static_cast<long>(i);
      }
    }
    summary["delta"] = *f.delta;
    if (lo >= 0) {
      const auto& r = rows[lo];
      summary["min_e"] = {{"window", window_json(r.window)}, {"E", r.e}, {"stderr", r.std_error}, {"n_matched", r.n_matched}};
      std::cerr << "delta " << fmt(*f.delta) << ": min E " << fmt(r.e) << " +- " << fmt(r.std_error, 3) << " at W = "
                << (std::isinf(r.window) ? std::string("inf") : fmt(r.window)) << " (" << r.n_matched << " matched)\n";
    } else {
      summary["min_e"] = nullptr;
    }
    const long small = smallest_window_with(rows, f.min_matched);
    summary["smallest_window"] = small >= 0 ? window_json(rows[small].window) : json(nullptr);
  }

  if (!f.settings_path.empty()) {
    const auto s = load_settings(f.settings_path);
    if (s.size() < 3) throw ConfigError(f.settings_path + ": the Bell audit needs three settings");
    const auto rows = bell_window_scan(model, {s[0], s[1], s[2]}, grid, f.pairs, *f.seed, opts);
    json bell = json::array();
    std::string bell_csv = "window,n_ab,E_ab,n_ac,E_ac,n_bc,E_bc,bell_sum,stderr,verdict\n";
    for (const auto& r : rows) {
      json row = bell_json(r.report);
      row["window"] = window_json(r.window);
      bell.push_back(row);
      char buf[400];
      auto e_of = [&](int p) { return r.report.estimates[p].value; };
      const bool ok = std::isfinite(r.report.bell_sum);
      std::snprintf(buf, sizeof buf, "%.17g,%llu,%.17g,%llu,%.17g,%llu,%.17g,%.17g,%.17g,%s\n", r.window,
                    static_cast<unsigned long long>(r.counts[0].total()), ok ? e_of(0) : NAN,
                    static_cast<unsigned long long>(r.counts[1].total()), ok ? e_of(1) : NAN,
                    static_cast<unsigned long long>(r.counts[2].total()), ok ? e_of(2) : NAN, r.report.bell_sum,
                    r.report.bell_sum_stderr, ok ? verdict_name(r.report.verdict).c_str() : "");
      bell_csv += buf;
    }
    summary["bell"] = bell;
    const long small = smallest_window_with(rows, f.min_matched);
    if (small >= 0) {
      const auto& r = rows[small];
      summary["bell_at_smallest_window"] = {{"window", window_json(r.window)},
                                            {"bell_sum", number_or_null(r.report.bell_sum)},
                                            {"verdict", verdict_name(r.report.verdict)}};
      std::cerr << "Bell sum at W = " << fmt(r.window) << ": " << fmt(r.report.bell_sum) << " +- "
                << fmt(r.report.bell_sum_stderr, 3) << " (" << verdict_name(r.report.verdict) << ")\n";
    } else {
      summary["bell_at_smallest_window"] = nullptr;
      std::cerr << "no window keeps " << f.min_matched << " coincidences for every pair\n";
    }
    if (!f.delta) csv = bell_csv;
  }

  emit(f.out, csv);
  if (!f.summary.empty()) emit(f.summary, summary.dump(2) + "\n");
  return kOk;
}

}  // namespace bellaudit::cli
