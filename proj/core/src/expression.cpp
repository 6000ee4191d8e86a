#include "bellaudit/expression.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "bellaudit/errors.hpp"

namespace bellaudit {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational parse_rational(const std::string& text) {
  auto fail = [&]() -> Rational { throw ConfigError("bad rational '" + text + "'"); };
  if (text.empty()) return fail();
  auto parse_int = [&](const std::string& s) -> std::int64_t {
    if (s.empty()) fail();
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      fail();
    }
    if (used != s.size()) fail();
    return v;
  };
  if (auto slash = text.find('/'); slash != std::string::npos) {
    const auto den = parse_int(text.substr(slash + 1));
    if (den == 0) fail();
    return Rational(parse_int(text.substr(0, slash)), den);
  }
  if (auto dot = text.find('.'); dot != std::string::npos) {
    const std::string frac = text.substr(dot + 1);
    if (frac.size() > 15 || frac.find_first_not_of("0123456789") != std::string::npos) fail();
    std::string whole = text.substr(0, dot);
    const bool negative = !whole.empty() && whole[0] == '-';
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::int64_t frac_num = frac.empty() ? 0 : parse_int(frac);
    const std::int64_t w = parse_int(whole);
    const std::int64_t num = w * den + (negative ? -frac_num : frac_num);
    return Rational(num, den);
  }
  return Rational(parse_int(text));
}

std::string to_string(const Variable& v) {
  std::string s(1, station_char(v.station));
  s += "_" + v.setting;
  if (v.st) s += "^" + *v.st;
  return s;
}

void Expression::validate() const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].factors.empty()) throw ConfigError("term " + std::to_string(i) + " has no factors");
    if (terms[i].coeff == Rational(0)) throw ConfigError("term " + std::to_string(i) + " has a zero coefficient");
    for (const auto& f : terms[i].factors) {
      if (f.setting.empty()) throw ConfigError("term " + std::to_string(i) + " has an unnamed setting");
    }
  }
}

Rational Expression::trivial_bound() const {
  Rational sum(0);
  for (const auto& t : terms) sum += boost::abs(t.coeff);
  return sum;
}

std::string to_string(const Expression& e) {
  std::ostringstream os;
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    const auto& t = e.terms[i];
    const bool neg = t.coeff < Rational(0);
    if (i > 0) os << (neg ? " - " : " + ");
    else if (neg) os << "-";
    const Rational mag = boost::abs(t.coeff);
    if (mag != Rational(1)) os << to_string(mag) << " ";
    for (std::size_t k = 0; k < t.factors.size(); ++k) {
      if (k) os << " ";
      os << to_string(t.factors[k]);
    }
  }
  if (e.stated_bound) {
    os << (e.comparison == Comparison::GreaterEqual ? " >= " : " <= ") << to_string(*e.stated_bound);
  }
  return os.str();
}

namespace {

Variable var(Station s, std::string setting, std::optional<std::string> st = std::nullopt) {
  return Variable{s, std::move(setting), std::move(st)};
}

Term pair_term(Variable x, Variable y) { return Term{Rational(1), {std::move(x), std::move(y)}}; }

}  // namespace

Expression builtin_expression(const std::string& name) {
  using S = Station;
  Expression e;
  if (name == "boole3") {
    e.terms = {pair_term(var(S::A, "a"), var(S::A, "b")), pair_term(var(S::A, "a"), var(S::A, "c")),
               pair_term(var(S::A, "b"), var(S::A, "c"))};
    e.comparison = Comparison::GreaterEqual;
    e.stated_bound = Rational(-1);
  } else if (name == "boole3-labeled") {
    e.terms = {pair_term(var(S::A, "a", "1"), var(S::A, "b", "2")),
               pair_term(var(S::A, "a", "3"), var(S::A, "c", "4")),
               pair_term(var(S::A, "b", "5"), var(S::A, "c", "6"))};
    e.comparison = Comparison::GreaterEqual;
    e.stated_bound = Rational(-3);
  } else if (name == "decyclified3") {
    return [] {
      Expression base = builtin_expression("boole3");
      Expression out;
      // Relabel directly rather than through decyclify() so the built-in
      // stays an independent fixture for it.
      int k = 1;
      for (auto t : base.terms) {
        for (auto& f : t.factors) f.st = "st_" + std::to_string(k++);
        out.terms.push_back(t);
      }
      out.comparison = Comparison::GreaterEqual;
      out.stated_bound = Rational(-3);
      return out;
    }();
  } else if (name == "bell3") {
    e.terms = {pair_term(var(S::A, "a"), var(S::B, "b")), pair_term(var(S::A, "a"), var(S::B, "c")),
               pair_term(var(S::A, "b"), var(S::B, "c"))};
    e.comparison = Comparison::LessEqual;
    e.stated_bound = Rational(1);
  } else if (name == "bell3-same-st") {
    e.terms = {pair_term(var(S::A, "a", "st_n"), var(S::B, "b", "st_n")),
               pair_term(var(S::A, "a", "st_n"), var(S::B, "c", "st_n")),
               pair_term(var(S::A, "b", "st_n"), var(S::B, "c", "st_n"))};
    e.comparison = Comparison::LessEqual;
    e.stated_bound = Rational(1);
  } else if (name == "bell3-labeled") {
    e.terms = {pair_term(var(S::A, "a", "st_1"), var(S::B, "b", "st_1'")),
               pair_term(var(S::A, "a", "st_2"), var(S::B, "c", "st_2'")),
               pair_term(var(S::A, "b", "st_3"), var(S::B, "c", "st_3'"))};
    e.comparison = Comparison::LessEqual;
    e.stated_bound = Rational(3);
  } else {
    std::string known;
    for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown builtin '" + name + "' (known: " + known + ")");
  }
  return e;
}

std::vector<std::string> builtin_names() {
  return {"boole3", "boole3-labeled", "decyclified3", "bell3", "bell3-same-st", "bell3-labeled"};
}

}  // namespace bellaudit
