#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bellaudit/core_model.hpp"
#include "bellaudit/stats.hpp"

namespace bellaudit {

inline constexpr int kMaxFeasibilityVariables = 12;
/// |slack| below this is reported as boundary-feasible.
inline constexpr double kBoundaryTolerance = 1e-9;
/// Sigma multiple within which an estimated violation is still read as boundary.
inline constexpr double kStatisticalSigmas = 5.0;

/// Expectations of +-1 variables 0..k-1: pairs E(X_i X_j), optional singles E(X_i).
struct CorrelationSet {
  int k = 0;
  std::map<std::pair<int, int>, double> pairs;  // keys with i < j
  std::map<int, double> singles;

  void set_pair(int i, int j, double e);
  std::optional<double> pair(int i, int j) const;
  /// Throws ConfigError on bad indices, values outside [-1,1], or k over the guard.
  void validate() const;

  /// k = 3 with E(X0 X1), E(X0 X2), E(X1 X2).
  static CorrelationSet triple(double e01, double e02, double e12);
};

enum class Verdict { Feasible, BoundaryFeasible, Infeasible };

std::string verdict_name(Verdict v);
inline bool is_feasible(Verdict v) { return v != Verdict::Infeasible; }

struct ClosedFormResult {
  Verdict verdict = Verdict::Feasible;
  /// 1 + E01 + E02 + E12, 1 + E01 - E02 - E12, 1 - E01 + E02 - E12, 1 - E01 - E02 + E12.
  std::array<double, 4> slacks{};
  std::vector<std::string> violated;  // conditions with slack < -tolerance
};

/// Boole's four conditions for three +-1 variables with free marginals.
ClosedFormResult feasible_closed_form_3(const CorrelationSet& c);

std::string closed_form_condition(int index);

/// Aggregated inequality that every classical distribution satisfies but
/// the input does not: constant + sum pair_coeffs*E_ij + sum single_coeffs*E_i <= 0.
struct FarkasCertificate {
  double constant = 0.0;
  std::map<std::pair<int, int>, double> pair_coeffs;
  std::map<int, double> single_coeffs;
  double observed = 0.0;  // value of the left side on the input (> 0)
  std::string text;
};

struct LpResult {
  Verdict verdict = Verdict::Feasible;
  double infeasibility = 0.0;
  /// 2^k atom probabilities; bit i of the atom index set means X_i = -1.
  std::optional<std::vector<double>> witness;
  std::optional<FarkasCertificate> certificate;
};

/// Linear feasibility over the 2^k-atom probability simplex.
LpResult feasible_lp(const CorrelationSet& c);

/// Expectations reproduced by an atom distribution (for witness checks).
double atom_expectation(const std::vector<double>& atoms, int k, std::vector<int> vars);

struct BellGameReport {
  std::array<std::string, 3> labels;  // settings a, b, c
  std::array<PairCounts, 3> counts;   // (a,b), (a,c), (b,c)
  std::array<Estimate, 3> estimates;  // E(A_i B_j)
  double bell_sum = 0.0;
  double bell_sum_stderr = 0.0;
  CorrelationSet a_form;   // E(A_i A_j) = -E(A_i B_j)
  ClosedFormResult closed_form;
  LpResult lp;
  /// Point-estimate verdict relaxed by kStatisticalSigmas * combined stderr.
  Verdict verdict = Verdict::Feasible;
  std::string message;
};

/// Estimates the three pair correlations from matched trials, maps them to
/// A-form and decides whether one probability space reproduces them.
/// Labels default to the first three settings of the dataset.
BellGameReport bell_game_report(const Dataset& d, std::optional<std::array<std::string, 3>> labels = {});

/// Same, from already-collected counts.
BellGameReport bell_game_report(const std::array<std::string, 3>& labels, const std::array<PairCounts, 3>& counts);

}  // namespace bellaudit
