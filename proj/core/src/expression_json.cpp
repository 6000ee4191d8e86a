#include <json.hpp>

#include "bellaudit/errors.hpp"
#include "bellaudit/expression.hpp"

namespace bellaudit {

using nlohmann::json;

namespace {

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_float()) {
    // Decimal literals are read through their shortest text form.
    json tmp = j;
    return parse_rational(tmp.dump());
  }
  throw ConfigError("expected a rational number, got " + j.dump());
}

json rational_to_json(const Rational& r) {
  if (r.denominator() == 1) return json(r.numerator());
  return json(to_string(r));
}

Station station_from_json(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "A") return Station::A;
  if (s == "B") return Station::B;
  throw ConfigError("station must be \"A\" or \"B\", got \"" + s + "\"");
}

}  // namespace

Expression expression_from_json(const std::string& text) {
  Expression e;
  try {
    const json j = json::parse(text);
    const auto cmp = j.value("comparison", std::string(">="));
    if (cmp == ">=" || cmp == "ge") e.comparison = Comparison::GreaterEqual;
    else if (cmp == "<=" || cmp == "le") e.comparison = Comparison::LessEqual;
    else throw ConfigError("comparison must be \">=\" or \"<=\"");
    if (j.contains("stated_bound") && !j["stated_bound"].is_null()) {
      e.stated_bound = rational_from_json(j["stated_bound"]);
    }
    for (const auto& jt : j.at("terms")) {
      Term t;
      t.coeff = jt.contains("coeff") ? rational_from_json(jt["coeff"]) : Rational(1);
      for (const auto& jf : jt.at("factors")) {
        Variable v;
        v.station = station_from_json(jf.at("station"));
        v.setting = jf.at("setting").get<std::string>();
        if (jf.contains("st") && !jf["st"].is_null()) {
          v.st = jf["st"].is_string() ? jf["st"].get<std::string>() : jf["st"].dump();
        }
        t.factors.push_back(std::move(v));
      }
      e.terms.push_back(std::move(t));
    }
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("expression JSON: ") + ex.what());
  }
  e.validate();
  return e;
}

std::string expression_to_json(const Expression& e) {
  json j;
  j["comparison"] = e.comparison == Comparison::GreaterEqual ? ">=" : "<=";
  j["stated_bound"] = e.stated_bound ? rational_to_json(*e.stated_bound) : json(nullptr);
  json terms = json::array();
  for (const auto& t : e.terms) {
    json factors = json::array();
    for (const auto& f : t.factors) {
      json jf{{"station", std::string(1, station_char(f.station))}, {"setting", f.setting}};
      if (f.st) jf["st"] = *f.st;
      factors.push_back(std::move(jf));
    }
    terms.push_back({{"coeff", rational_to_json(t.coeff)}, {"factors", std::move(factors)}});
  }
  j["terms"] = std::move(terms);
  return j.dump(2);
}

}  // namespace bellaudit
