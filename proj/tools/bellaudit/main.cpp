#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include "args.hpp"
#include "bellaudit/dataset_io.hpp"
#include "bellaudit/errors.hpp"
#include "commands.hpp"

using namespace bellaudit;
using namespace bellaudit::cli;

namespace {

void add_model_flags(CLI::App* app, ModelFlags& m) {
  app->add_option("--model", m.model, "quantum | deterministic | timetag")->capture_default_str();
  app->add_option("--encoding", m.encoding, "spin | polarization")->capture_default_str();
  app->add_option("--delay-max", m.delay_max, "time-tag model: maximal delay T_max (default 1)");
  app->add_option("--delay-exponent", m.delay_exponent, "time-tag model: exponent d (default 2)");
  app->add_option("--base-interval", m.base_interval, "seconds between emissions (default 10)");
}

// Locates --config in argv (either "--config x" or "--config=x").
std::string find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit EPR-Bohm correlation experiments: simulate, bound, check embeddability."};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  unsigned threads = 1;
  app.add_option("--config", config_path, "JSON file of option values; flags on the command line win");
  app.add_option("--threads", threads, "worker threads (output does not depend on it)")->capture_default_str();

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "run a model and write the trial CSV plus sidecar");
  add_model_flags(simulate, sim.model);
  simulate->add_option("--settings", sim.settings_path, "settings JSON (default a,b,c at 0/120/240 degrees)");
  simulate->add_option("--schedule", sim.schedule, "bell | all | full | a:b,a:c,...")->capture_default_str();
  simulate->add_flag("--random-schedule", sim.random_schedule, "draw each trial's pair at random instead of cycling");
  simulate->add_option("--pairs", sim.pairs, "trials per setting pair")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "master seed (required)");
  simulate->add_option("--window", sim.window, "coincidence window in seconds, or inf")->capture_default_str();
  simulate->add_option("--match", sim.match, "nearest | same-trial")->capture_default_str();
  simulate->add_option("--out", sim.out, "output CSV, - for stdout");

  AuditFlags aud;
  auto* audit = app.add_subcommand("audit", "Bell-sum audit and embeddability verdict for a dataset");
  audit->add_option("--in", aud.in, "trial CSV")->required();
  audit->add_option("--labels", aud.labels, "settings a,b,c of the audit (default: first three)");
  audit->add_option("--window", aud.window, "re-apply coincidence filtering with this window");
  audit->add_option("--match", aud.match, "nearest | same-trial")->capture_default_str();
  audit->add_option("--builtin", aud.builtin, "also evaluate a built-in expression on the data");
  audit->add_option("--expr", aud.expr_path, "also evaluate an expression file on the data");
  audit->add_flag("--anticorrelated", aud.anticorrelated, "read B factors as -A at the same label");
  audit->add_option("--out", aud.out, "report JSON, - for stdout")->capture_default_str();

  BoundsFlags bnd;
  auto* bounds = app.add_subcommand("bounds", "exact bounds and cyclicity of an expression");
  bounds->add_option("--builtin", bnd.builtin, "boole3 | boole3-labeled | decyclified3 | bell3 | bell3-same-st | bell3-labeled");
  bounds->add_option("--expr", bnd.expr_path, "expression JSON file");
  bounds->add_flag("--anticorrelated", bnd.anticorrelated, "impose B = -A at equal setting and label");
  bounds->add_option("--out", bnd.out, "report JSON, - for stdout")->capture_default_str();

  FeasibilityFlags fea;
  auto* feasibility = app.add_subcommand("feasibility", "decide whether correlations fit one probability space");
  feasibility->add_option("--corr", fea.corr, "E01,E02,E12 for three variables");
  feasibility->add_option("--in", fea.in, "JSON {k, pairs:[{i,j,e}], singles:[{i,e}]}");
  feasibility->add_option("--out", fea.out, "report JSON, - for stdout")->capture_default_str();

  ScanFlags scn;
  auto* scan = app.add_subcommand("scan-window", "correlation and Bell sum versus coincidence window");
  add_model_flags(scan, scn.model);
  scan->add_option("--delta", scn.delta, "relative setting angle in radians");
  scan->add_option("--settings", scn.settings_path, "three settings for a Bell audit per window");
  scan->add_option("--windows", scn.windows, "window grid, e.g. inf,1e-4:1:log30")->capture_default_str();
  scan->add_option("--pairs", scn.pairs, "trials per point (per setting pair for the Bell audit)")->capture_default_str();
  scan->add_option("--seed", scn.seed, "master seed (required)");
  scan->add_flag("--regenerate", scn.regenerate, "fresh data for every window instead of re-filtering one run");
  scan->add_option("--match", scn.match, "nearest | same-trial")->capture_default_str();
  scan->add_option("--min-matched", scn.min_matched, "coincidences needed for the smallest-window report")
      ->capture_default_str();
  scan->add_option("--out", scn.out, "scan CSV, - for stdout")->capture_default_str();
  scan->add_option("--summary", scn.summary, "summary JSON path");

  ValidateFlags val;
  auto* validate = app.add_subcommand("validate", "check dataset invariants");
  validate->add_option("--in", val.in, "trial CSV")->required();
  validate->add_option("--out", val.out, "violation report JSON, - for stdout");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const std::string cfg = find_config(args);
    if (!cfg.empty()) {
      const auto subs = app.get_subcommands({});
      const auto sub = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
        return std::any_of(subs.begin(), subs.end(), [&](const CLI::App* s) { return s->get_name() == a; });
      });
      if (sub != args.end()) {
        CLI::App* target = app.get_subcommand(*sub);
        std::vector<std::string> skipped;
        const auto tokens = config_tokens(
            read_text_file(cfg),
            [&](const std::string& key) {
              return target->get_option_no_throw("--" + key) != nullptr || key == "threads";
            },
            skipped);
        for (const auto& k : skipped) std::cerr << "note: config key '" << k << "' does not apply to " << *sub << "\n";
        // Config values go first so later command-line flags take precedence.
        args.insert(sub + 1, tokens.begin(), tokens.end());
      }
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }

  sim.threads = bnd.threads = scn.threads = threads;
  try {
    if (*simulate) return cmd_simulate(sim);
    if (*audit) return cmd_audit(aud);
    if (*bounds) return cmd_bounds(bnd);
    if (*feasibility) return cmd_feasibility(fea);
    if (*scan) return cmd_scan_window(scn);
    if (*validate) return cmd_validate(val);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const GuardExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kConfigError;
}
