#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "bellaudit/core_model.hpp"

namespace bellaudit {

using Rational = boost::rational<std::int64_t>;

std::string to_string(const Rational& r);
/// Accepts "p", "p/q" and finite decimals such as "-0.25".
Rational parse_rational(const std::string& text);

/// A labeled two-valued variable such as A_a or A_a^{st_3}. An absent
/// space-time label means the variable is shared by every unlabeled
/// occurrence, as in the usual single-lambda notation.
struct Variable {
  Station station = Station::A;
  std::string setting;
  std::optional<std::string> st;

  friend auto operator<=>(const Variable&, const Variable&) = default;
  friend bool operator==(const Variable&, const Variable&) = default;
};

std::string to_string(const Variable& v);

struct Term {
  Rational coeff{1};
  std::vector<Variable> factors;
};

enum class Comparison { GreaterEqual, LessEqual };

struct Expression {
  std::vector<Term> terms;
  Comparison comparison = Comparison::GreaterEqual;
  std::optional<Rational> stated_bound;

  /// Throws ConfigError for empty factor lists or zero coefficients.
  void validate() const;
  /// Sum of |coeff| over the listed terms.
  Rational trivial_bound() const;
};

std::string to_string(const Expression& e);

struct ConstraintSet {
  /// B at (setting, st) is replaced by -A at the same (setting, st).
  bool anticorrelation = false;
};

/// JSON: {comparison, stated_bound, terms:[{coeff, factors:[{station, setting, st}]}]}.
Expression expression_from_json(const std::string& text);
std::string expression_to_json(const Expression& e);

/// Named expressions from the Boole/Bell literature:
///   boole3         A_a A_b + A_a A_c + A_b A_c >= -1
///   boole3-labeled the same with six distinct labels 1..6, >= -3
///   decyclified3   boole3 relabeled st_1..st_6, >= -3
///   bell3          A_a B_b + A_a B_c + A_b B_c <= +1 (unlabeled)
///   bell3-same-st  bell3 with every factor at one label st_n, <= +1
///   bell3-labeled  A_a^{st_1} B_b^{st_1'} + ... with per-term labels, <= +3
Expression builtin_expression(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace bellaudit
