#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bellaudit/core_model.hpp"
#include "bellaudit/expression.hpp"
#include "bellaudit/stats.hpp"

namespace bellaudit {

inline constexpr std::size_t kMaxEnumerationVariables = 30;

/// Expression after constraint substitution, indexed over its distinct
/// variables. Each factor is an index into `variables`; substitution signs
/// are folded into the coefficient.
struct ReducedExpression {
  struct Term {
    Rational coeff;
    std::vector<std::size_t> factors;
  };
  std::vector<Variable> variables;  // sorted, unique
  std::vector<Term> terms;
};

ReducedExpression reduce(const Expression& e, const ConstraintSet& c);

/// Distinct variables after constraint substitution, in lexicographic order.
std::vector<Variable> distinct_variables(const Expression& e, const ConstraintSet& c);

struct Bounds {
  Rational min{0};
  Rational max{0};
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Exact min and max over all +-1 assignments. Throws GuardExceeded above
/// kMaxEnumerationVariables distinct variables.
Bounds tight_bounds(const Expression& e, const ConstraintSet& c = {}, unsigned threads = 0);

struct CyclicityReport {
  bool cyclic = false;
  Bounds tight;
  Rational trivial{0};  // trivial bounds are [-trivial, +trivial]
  /// Closed walk v0, v1, ..., v0 through the variable graph (pairwise
  /// products only).
  std::optional<std::vector<Variable>> witness;
};

/// Cyclic iff the tight bounds are strictly inside the trivial ones.
CyclicityReport has_cyclicity(const Expression& e, const ConstraintSet& c = {});

/// Graph route for expressions made only of pairwise products: variables are
/// vertices, terms are signed edges, and a frustrated cycle (odd length or
/// negative sign product) is found with a parity union-find. Returns nullopt
/// when no such cycle exists; throws ConfigError for non-pairwise terms.
std::optional<std::vector<Variable>> frustrated_cycle(const Expression& e, const ConstraintSet& c = {});

bool all_pairwise(const Expression& e);

/// Gives every factor occurrence a fresh label st_m, st_{m+1}, ... in
/// term-then-factor order.
Expression decyclify(const Expression& e, std::uint64_t start_index = 1);

struct Binding {
  /// Allows an A_i A_j term to be read as -E(A_i B_j) from one trial.
  bool anticorrelation = false;
  /// Keep the per-trial products (off for large datasets).
  bool keep_per_trial = false;
};

struct TermEstimate {
  Rational coeff;
  int sign = 1;  // from anticorrelation reflection
  std::string setting_a;
  std::string setting_b;
  PairCounts counts;
  Estimate estimate;     // E over the matched trials of this setting pair
  double contribution = 0.0;  // coeff * sign * E
  std::vector<std::pair<std::uint64_t, int>> per_trial;  // (trial_index, A*B)
};

struct ExpressionEvaluation {
  std::vector<TermEstimate> terms;
  double value = 0.0;
  double std_error = 0.0;
};

/// Estimates the expression on EPR data. Terms sharing a space-time label
/// (unlabeled factors share one label) must be recordable within one trial;
/// an expression that needs two settings at one station in one trial throws
/// IncompatibleMeasurements.
ExpressionEvaluation evaluate_on_dataset(const Expression& e, const Dataset& d, const Binding& binding = {});

}  // namespace bellaudit
