#include "bellaudit/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bellaudit/errors.hpp"
#include "bellaudit/simplex.hpp"

namespace bellaudit {

void CorrelationSet::set_pair(int i, int j, double e) {
  if (i > j) std::swap(i, j);
  pairs[{i, j}] = e;
}

std::optional<double> CorrelationSet::pair(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = pairs.find({i, j});
  if (it == pairs.end()) return std::nullopt;
  return it->second;
}

void CorrelationSet::validate() const {
  if (k < 1) throw ConfigError("correlation set needs k >= 1");
  if (k > kMaxFeasibilityVariables) {
    throw GuardExceeded("k = " + std::to_string(k) + " exceeds the atom guard of " +
                        std::to_string(kMaxFeasibilityVariables) + " variables");
  }
  auto check_value = [](double e, const std::string& what) {
    if (!(e >= -1.0 && e <= 1.0)) throw ConfigError(what + " expectation " + std::to_string(e) + " outside [-1, 1]");
  };
  for (const auto& [ij, e] : pairs) {
    const auto [i, j] = ij;
    if (i < 0 || j >= k || i >= j) {
      throw ConfigError("bad pair index (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    check_value(e, "pair");
  }
  for (const auto& [i, e] : singles) {
    if (i < 0 || i >= k) throw ConfigError("bad single index " + std::to_string(i));
    check_value(e, "single");
  }
}

CorrelationSet CorrelationSet::triple(double e01, double e02, double e12) {
  CorrelationSet c;
  c.k = 3;
  c.set_pair(0, 1, e01);
  c.set_pair(0, 2, e02);
  c.set_pair(1, 2, e12);
  return c;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "feasible";
    case Verdict::BoundaryFeasible: return "boundary-feasible";
    case Verdict::Infeasible: return "infeasible";
  }
  return "?";
}

std::string closed_form_condition(int index) {
  static const char* names[4] = {"1 + E01 + E02 + E12 >= 0", "1 + E01 - E02 - E12 >= 0",
                                 "1 - E01 + E02 - E12 >= 0", "1 - E01 - E02 + E12 >= 0"};
  return names[index];
}

namespace {

Verdict verdict_from_slack(double min_slack) {
  if (min_slack >= kBoundaryTolerance) return Verdict::Feasible;
  if (min_slack >= -kBoundaryTolerance) return Verdict::BoundaryFeasible;
  return Verdict::Infeasible;
}

}  // namespace

ClosedFormResult feasible_closed_form_3(const CorrelationSet& c) {
  c.validate();
  if (c.k != 3) throw ConfigError("closed form needs k = 3");
  if (!c.singles.empty()) throw ConfigError("closed form treats marginals as free; use the LP for singles");
  const auto e01 = c.pair(0, 1);
  const auto e02 = c.pair(0, 2);
  const auto e12 = c.pair(1, 2);
  if (!e01 || !e02 || !e12) throw ConfigError("closed form needs all three pair expectations");
  ClosedFormResult r;
  r.slacks = {1 + *e01 + *e02 + *e12, 1 + *e01 - *e02 - *e12, 1 - *e01 + *e02 - *e12,
              1 - *e01 - *e02 + *e12};
  for (int i = 0; i < 4; ++i) {
    if (r.slacks[i] < -kBoundaryTolerance) r.violated.push_back(closed_form_condition(i));
  }
  r.verdict = verdict_from_slack(*std::min_element(r.slacks.begin(), r.slacks.end()));
  return r;
}

double atom_expectation(const std::vector<double>& atoms, int k, std::vector<int> vars) {
  double s = 0.0;
  for (std::size_t w = 0; w < atoms.size() && w < (std::size_t{1} << k); ++w) {
    int sign = 1;
    for (int v : vars) {
      if ((w >> v) & 1U) sign = -sign;
    }
    s += sign * atoms[w];
  }
  return s;
}

LpResult feasible_lp(const CorrelationSet& c) {
  c.validate();
  const std::size_t atoms = std::size_t{1} << c.k;
  const std::size_t rows = 1 + c.pairs.size() + c.singles.size();
  DenseMatrix a(rows, atoms);
  std::vector<double> b(rows);

  auto spin = [](std::size_t w, int v) { return ((w >> v) & 1U) ? -1.0 : 1.0; };
  std::size_t r = 0;
  for (std::size_t w = 0; w < atoms; ++w) a(r, w) = 1.0;
  b[r++] = 1.0;
  for (const auto& [ij, e] : c.pairs) {
    for (std::size_t w = 0; w < atoms; ++w) a(r, w) = spin(w, ij.first) * spin(w, ij.second);
    b[r++] = e;
  }
  for (const auto& [i, e] : c.singles) {
    for (std::size_t w = 0; w < atoms; ++w) a(r, w) = spin(w, i);
    b[r++] = e;
  }

  const PhaseOneResult p1 = solve_phase_one(a, b);
  LpResult out;
  out.infeasibility = p1.infeasibility;
  if (p1.infeasibility <= kBoundaryTolerance) {
    out.verdict = Verdict::Feasible;
    // Boundary is only decidable in closed form; use it where it applies.
    if (c.k == 3 && c.pairs.size() == 3 && c.singles.empty()) {
      const auto cf = feasible_closed_form_3(c);
      if (cf.verdict == Verdict::BoundaryFeasible) out.verdict = Verdict::BoundaryFeasible;
    }
    std::vector<double> x = p1.x;
    double total = 0.0;
    for (double v : x) total += v;
    if (total > 0) {
      for (double& v : x) v /= total;
    }
    out.witness = std::move(x);
    return out;
  }

  out.verdict = Verdict::Infeasible;
  // Scale so the largest multiplier has magnitude one.
  double scale = 0.0;
  for (double y : p1.y) scale = std::max(scale, std::abs(y));
  if (scale <= 0.0) return out;
  FarkasCertificate cert;
  r = 0;
  cert.constant = p1.y[r++] / scale;
  std::string text;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", cert.constant);
  text = buf;
  double observed = cert.constant;
  for (const auto& [ij, e] : c.pairs) {
    const double y = p1.y[r++] / scale;
    if (std::abs(y) < 1e-12) continue;
    cert.pair_coeffs[ij] = y;
    observed += y * e;
    std::snprintf(buf, sizeof buf, " %+.6g*E%d%d", y, ij.first, ij.second);
    text += buf;
  }
  for (const auto& [i, e] : c.singles) {
    const double y = p1.y[r++] / scale;
    if (std::abs(y) < 1e-12) continue;
    cert.single_coeffs[i] = y;
    observed += y * e;
    std::snprintf(buf, sizeof buf, " %+.6g*E%d", y, i);
    text += buf;
  }
  cert.observed = observed;
  std::snprintf(buf, sizeof buf, " <= 0 (observed %.6g)", observed);
  cert.text = text + buf;
  out.certificate = std::move(cert);
  return out;
}

BellGameReport bell_game_report(const std::array<std::string, 3>& labels, const std::array<PairCounts, 3>& counts) {
  BellGameReport rep;
  rep.labels = labels;
  rep.counts = counts;
  const char* names[3] = {"(a,b)", "(a,c)", "(b,c)"};
  double var = 0.0;
  for (int p = 0; p < 3; ++p) {
    if (counts[p].total() == 0) {
      throw DataError(std::string("no matched trials for setting pair ") + names[p]);
    }
    rep.estimates[p] = estimate_correlation(counts[p]);
    rep.bell_sum += rep.estimates[p].value;
    var += rep.estimates[p].std_error * rep.estimates[p].std_error;
  }
  rep.bell_sum_stderr = std::sqrt(var);
  // E(A_i A_j) = -E(A_i B_j) under perfect anticorrelation.
  rep.a_form = CorrelationSet::triple(-rep.estimates[0].value, -rep.estimates[1].value,
                                      -rep.estimates[2].value);
  rep.closed_form = feasible_closed_form_3(rep.a_form);
  rep.lp = feasible_lp(rep.a_form);

  // Each condition is a +-1 combination of the three estimates.
  const double min_slack = *std::min_element(rep.closed_form.slacks.begin(), rep.closed_form.slacks.end());
  if (rep.lp.verdict != Verdict::Infeasible) {
    rep.verdict = rep.lp.verdict;
  } else if (min_slack >= -kStatisticalSigmas * rep.bell_sum_stderr) {
    rep.verdict = Verdict::BoundaryFeasible;
  } else {
    rep.verdict = Verdict::Infeasible;
  }
  if (rep.verdict == Verdict::Infeasible) {
    rep.message = "no sigma-algebra exists on which these functions can be defined";
    if (!rep.closed_form.violated.empty()) rep.message += " (violated: " + rep.closed_form.violated.front() + ")";
  } else if (rep.verdict == Verdict::BoundaryFeasible) {
    rep.message = "a single probability space reproduces these data (boundary, within statistical tolerance)";
  } else {
    rep.message = "a single probability space reproduces these data";
  }
  return rep;
}

BellGameReport bell_game_report(const Dataset& d, std::optional<std::array<std::string, 3>> labels) {
  std::array<std::string, 3> l;
  if (labels) {
    l = *labels;
  } else {
    if (d.settings.size() < 3) throw DataError("Bell game report needs three settings");
    l = {d.settings[0].label(), d.settings[1].label(), d.settings[2].label()};
  }
  return bell_game_report(l, {count_pair(d, l[0], l[1]), count_pair(d, l[0], l[2]), count_pair(d, l[1], l[2])});
}

}  // namespace bellaudit
