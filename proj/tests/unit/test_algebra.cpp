#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "bellaudit/algebra.hpp"
#include "bellaudit/errors.hpp"
#include "bellaudit/simulator.hpp"
#include "oracles.hpp"

using namespace bellaudit;
using std::numbers::pi;

namespace {

const ConstraintSet kAnti{true};

Variable A(const std::string& s, std::optional<std::string> st = std::nullopt) { return {Station::A, s, st}; }
Variable B(const std::string& s, std::optional<std::string> st = std::nullopt) { return {Station::B, s, st}; }

Expression random_pairwise(std::mt19937_64& gen, int max_vars, int max_terms) {
  const int nvars = 1 + static_cast<int>(gen() % max_vars);
  const int nterms = 1 + static_cast<int>(gen() % max_terms);
  Expression e;
  for (int t = 0; t < nterms; ++t) {
    const int u = static_cast<int>(gen() % nvars);
    const int v = static_cast<int>(gen() % nvars);
    std::int64_t c = 1 + static_cast<std::int64_t>(gen() % 3);
    if (gen() % 2) c = -c;
    e.terms.push_back(Term{Rational(c), {A("s" + std::to_string(u)), A("s" + std::to_string(v))}});
  }
  return e;
}

// Independent brute force straight from the expression (own variable indexing).
std::pair<double, double> brute(const Expression& e, bool anticorrelation) {
  std::vector<std::tuple<std::string, std::string>> keys;
  std::vector<oracle::BruteTerm> terms;
  for (const auto& t : e.terms) {
    oracle::BruteTerm bt{t.coeff.numerator(), t.coeff.denominator(), {}};
    for (const auto& f : t.factors) {
      Station st = f.station;
      if (anticorrelation && st == Station::B) {
        st = Station::A;
        bt.num = -bt.num;
      }
      const auto key = std::make_tuple(std::string(1, station_char(st)) + f.setting, f.st.value_or("<none>"));
      auto it = std::find(keys.begin(), keys.end(), key);
      if (it == keys.end()) {
        keys.push_back(key);
        it = keys.end() - 1;
      }
      bt.vars.push_back(static_cast<int>(it - keys.begin()));
    }
    terms.push_back(bt);
  }
  return oracle::brute_bounds(static_cast<int>(keys.size()), terms);
}

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("-1/2") == Rational(-1, 2));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-0.5") == Rational(-1, 2));
  CHECK_THROWS_AS(parse_rational("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_rational("abc"), ConfigError);
}

TEST_CASE("distinct variables") {
  const auto v1 = distinct_variables(builtin_expression("boole3"), {});
  REQUIRE(v1.size() == 3);
  CHECK(v1[0] == A("a"));
  CHECK(v1[2] == A("c"));
  CHECK(distinct_variables(builtin_expression("bell3"), kAnti).size() == 3);
  CHECK(distinct_variables(builtin_expression("bell3"), {}).size() == 4);
  CHECK(distinct_variables(builtin_expression("boole3-labeled"), {}).size() == 6);
}

TEST_CASE("tight bounds of the built-ins") {
  CHECK(tight_bounds(builtin_expression("boole3")) == Bounds{Rational(-1), Rational(3)});
  CHECK(tight_bounds(builtin_expression("boole3-labeled")) == Bounds{Rational(-3), Rational(3)});
  CHECK(tight_bounds(builtin_expression("decyclified3")) == Bounds{Rational(-3), Rational(3)});
  CHECK(tight_bounds(builtin_expression("bell3"), kAnti) == Bounds{Rational(-3), Rational(1)});
  CHECK(tight_bounds(builtin_expression("bell3-same-st"), kAnti) == Bounds{Rational(-3), Rational(1)});
  CHECK(tight_bounds(builtin_expression("bell3-labeled"), kAnti) == Bounds{Rational(-3), Rational(3)});
  CHECK(tight_bounds(builtin_expression("bell3"), {}) == Bounds{Rational(-3), Rational(3)});
}

TEST_CASE("anticorrelation reflects the Boole bounds") {
  const auto boole = tight_bounds(builtin_expression("boole3"));
  const auto bell = tight_bounds(builtin_expression("bell3"), kAnti);
  CHECK(bell.min == -boole.max);
  CHECK(bell.max == -boole.min);
}

TEST_CASE("disjoint parts and constant terms") {
  Expression e = builtin_expression("boole3");
  for (auto t : builtin_expression("boole3").terms) {
    for (auto& f : t.factors) f.setting += "2";
    e.terms.push_back(t);
  }
  e.terms.push_back(Term{Rational(1, 2), {A("a"), A("a")}});
  const auto b = tight_bounds(e);
  CHECK(b.min == Rational(-3, 2));
  CHECK(b.max == Rational(13, 2));
  const auto [lo, hi] = brute(e, false);
  CHECK(lo == -1.5);
  CHECK(hi == 6.5);
}

TEST_CASE("rational coefficients stay exact") {
  Expression e;
  e.terms = {Term{Rational(1, 3), {A("a"), A("b")}}, Term{Rational(-1, 2), {A("b"), A("c")}},
             Term{Rational(1, 6), {A("a"), A("c")}}};
  const auto b = tight_bounds(e);
  // brute: max 1/3 + 1/2 + 1/6 is unreachable (odd frustration), so 2/3.
  const auto [lo, hi] = brute(e, false);
  CHECK(boost::rational_cast<double>(b.min) == doctest::Approx(lo));
  CHECK(boost::rational_cast<double>(b.max) == doctest::Approx(hi));
  CHECK(b.max == Rational(2, 3));
}

TEST_CASE("enumeration guard") {
  Expression e;
  for (int i = 0; i < 31; ++i) e.terms.push_back(Term{Rational(1), {A("x" + std::to_string(i))}});
  CHECK_THROWS_AS(tight_bounds(e), GuardExceeded);
  e.terms.pop_back();
  CHECK(tight_bounds(e) == Bounds{Rational(-30), Rational(30)});
}

TEST_CASE("expression validation") {
  Expression e;
  e.terms = {Term{Rational(0), {A("a")}}};
  CHECK_THROWS_AS(tight_bounds(e), ConfigError);
  e.terms = {Term{Rational(1), {}}};
  CHECK_THROWS_AS(tight_bounds(e), ConfigError);
}

TEST_CASE("cyclicity of the built-ins") {
  const auto boole = has_cyclicity(builtin_expression("boole3"));
  CHECK(boole.cyclic);
  REQUIRE(boole.witness.has_value());
  CHECK(*boole.witness == std::vector<Variable>{A("a"), A("b"), A("c"), A("a")});

  const auto relabeled = has_cyclicity(builtin_expression("decyclified3"));
  CHECK_FALSE(relabeled.cyclic);
  CHECK_FALSE(relabeled.witness.has_value());

  Expression single;
  single.terms = {Term{Rational(1), {A("a"), A("b")}}};
  CHECK_FALSE(has_cyclicity(single).cyclic);

  const auto bell = has_cyclicity(builtin_expression("bell3"), kAnti);
  CHECK(bell.cyclic);
  CHECK(bell.witness->size() == 4);
  CHECK_FALSE(has_cyclicity(builtin_expression("bell3"), {}).cyclic);
}

TEST_CASE("graph witness covers loops, multi-edges and non-pairwise terms") {
  Expression loop;
  loop.terms = {Term{Rational(1), {A("a"), A("a")}}};
  CHECK(has_cyclicity(loop).cyclic);
  CHECK(*frustrated_cycle(loop) == std::vector<Variable>{A("a"), A("a")});

  Expression cancel;
  cancel.terms = {Term{Rational(1), {A("a"), A("b")}}, Term{Rational(-2), {A("a"), A("b")}}};
  CHECK(has_cyclicity(cancel).cyclic);
  CHECK(frustrated_cycle(cancel)->size() == 3);

  Expression square;
  square.terms = {Term{Rational(1), {A("a"), B("b")}}, Term{Rational(1), {A("a"), B("c")}},
                  Term{Rational(1), {A("d"), B("b")}}, Term{Rational(1), {A("d"), B("c")}}};
  CHECK_FALSE(has_cyclicity(square).cyclic);
  square.terms[3].coeff = Rational(-1);
  CHECK(has_cyclicity(square).cyclic);
  CHECK(has_cyclicity(square).witness->size() == 5);

  Expression triple;
  triple.terms = {Term{Rational(1), {A("a"), A("b"), A("c")}}, Term{Rational(1), {A("a")}}};
  const auto r = has_cyclicity(triple);
  CHECK_FALSE(r.cyclic);
  CHECK_FALSE(r.witness.has_value());
  CHECK_THROWS_AS(frustrated_cycle(triple), ConfigError);
}

TEST_CASE("decyclify") {
  const auto d = decyclify(builtin_expression("boole3"), 1);
  std::set<std::string> labels;
  for (const auto& t : d.terms) {
    for (const auto& f : t.factors) labels.insert(*f.st);
  }
  CHECK(labels == std::set<std::string>{"st_1", "st_2", "st_3", "st_4", "st_5", "st_6"});
  CHECK(tight_bounds(d) == Bounds{Rational(-3), Rational(3)});
  CHECK(*d.stated_bound == Rational(-3));
  CHECK_FALSE(has_cyclicity(d).cyclic);

  const auto again = decyclify(d, 7);
  CHECK(again.terms[0].factors[0].st == "st_7");
  CHECK(tight_bounds(again) == tight_bounds(d));

  const auto bell = decyclify(builtin_expression("bell3"), 1);
  CHECK(tight_bounds(bell, kAnti) == Bounds{Rational(-3), Rational(3)});
  CHECK(*bell.stated_bound == Rational(3));
}

TEST_CASE("enumeration agrees with an independent brute force") {
  std::mt19937_64 gen(7);
  for (int round = 0; round < 120; ++round) {
    const int max_vars = round < 100 ? 10 : 20;
    Expression e;
    const int nvars = 1 + static_cast<int>(gen() % max_vars);
    const int nterms = 1 + static_cast<int>(gen() % 8);
    for (int t = 0; t < nterms; ++t) {
      Term term;
      term.coeff = Rational(static_cast<std::int64_t>(gen() % 7) - 3);
      if (term.coeff == Rational(0)) term.coeff = Rational(1, 2);
      const int nf = 1 + static_cast<int>(gen() % 4);
      for (int f = 0; f < nf; ++f) {
        const int v = static_cast<int>(gen() % nvars);
        term.factors.push_back(Variable{gen() % 2 ? Station::A : Station::B, "s" + std::to_string(v % 5),
                                        v < 5 ? std::nullopt : std::optional<std::string>(std::to_string(v / 5))});
      }
      e.terms.push_back(term);
    }
    const bool anti = gen() % 2;
    const auto b = tight_bounds(e, ConstraintSet{anti});
    const auto [lo, hi] = brute(e, anti);
    CHECK(boost::rational_cast<double>(b.min) == lo);
    CHECK(boost::rational_cast<double>(b.max) == hi);
  }
}

TEST_CASE("graph fast path agrees with the bound gap; decyclify removes cyclicity") {
  std::mt19937_64 gen(11);
  for (int round = 0; round < 200; ++round) {
    const auto e = random_pairwise(gen, 1 + static_cast<int>(gen() % 12), 6);
    const auto rep = has_cyclicity(e);
    CHECK(rep.cyclic == frustrated_cycle(e).has_value());
    if (e.terms.size() <= 6) CHECK_FALSE(has_cyclicity(decyclify(e, 1 + gen() % 50)).cyclic);
  }
}

TEST_CASE("expression json round trip") {
  const auto e = builtin_expression("bell3-labeled");
  const auto back = expression_from_json(expression_to_json(e));
  REQUIRE(back.terms.size() == 3);
  CHECK(back.terms[0].factors[1] == B("b", "st_1'"));
  CHECK(back.comparison == Comparison::LessEqual);
  CHECK(*back.stated_bound == Rational(3));

  const auto parsed = expression_from_json(R"({"comparison": ">=", "stated_bound": "-1",
    "terms": [{"coeff": "1/2", "factors": [{"station": "A", "setting": "a"}, {"station": "A", "setting": "b", "st": 3}]}]})");
  CHECK(parsed.terms[0].coeff == Rational(1, 2));
  CHECK(parsed.terms[0].factors[1].st == std::optional<std::string>("3"));
  CHECK_THROWS_AS(expression_from_json(R"({"terms": [{"coeff": 1, "factors": [{"station": "C", "setting": "a"}]}]})"),
                  ConfigError);
  CHECK_THROWS_AS(expression_from_json(R"({"terms": [{"coeff": 0, "factors": [{"station": "A", "setting": "a"}]}]})"),
                  ConfigError);
}

TEST_CASE("evaluation on EPR data") {
  const std::vector<Setting> s{Setting::planar("a", 0.0), Setting::planar("b", 2 * pi / 3),
                               Setting::planar("c", 4 * pi / 3)};
  ModelConfig q;
  const auto quantum = run_experiment(q, s, Schedule::bell_triple(s), 90000, 3);

  SUBCASE("shared-label expressions are incompatible") {
    CHECK_THROWS_AS(evaluate_on_dataset(builtin_expression("bell3"), quantum), IncompatibleMeasurements);
    CHECK_THROWS_AS(evaluate_on_dataset(builtin_expression("bell3-same-st"), quantum), IncompatibleMeasurements);
    CHECK_THROWS_AS(evaluate_on_dataset(builtin_expression("boole3"), quantum, Binding{true}),
                    IncompatibleMeasurements);
  }
  SUBCASE("labeled Bell form: each term about +1/2") {
    const auto ev = evaluate_on_dataset(builtin_expression("bell3-labeled"), quantum);
    REQUIRE(ev.terms.size() == 3);
    for (const auto& t : ev.terms) CHECK(std::abs(t.estimate.value - 0.5) < 5 * t.estimate.std_error);
    CHECK(std::abs(ev.value - 1.5) < 5 * ev.std_error);
    CHECK(ev.value > 1.0);
  }
  SUBCASE("deterministic data stays within the bound") {
    ModelConfig det;
    det.kind = ModelKind::DeterministicSign;
    const auto d = run_experiment(det, s, Schedule::bell_triple(s), 90000, 4);
    const auto ev = evaluate_on_dataset(builtin_expression("bell3-labeled"), d);
    CHECK(ev.value <= 1.0 + 5 * ev.std_error);
  }
  SUBCASE("A-A terms need the anticorrelation binding") {
    CHECK_THROWS_AS(evaluate_on_dataset(builtin_expression("decyclified3"), quantum), DataError);
    const auto ev = evaluate_on_dataset(builtin_expression("decyclified3"), quantum, Binding{true, true});
    // E(A_i A_j) = -E(A_i B_j) = -1/2 each.
    CHECK(std::abs(ev.value + 1.5) < 5 * ev.std_error);
    CHECK(ev.terms[0].sign == -1);
    CHECK(ev.terms[0].per_trial.size() == ev.terms[0].counts.total());
  }
  SUBCASE("missing setting pair") {
    Expression e;
    e.terms = {Term{Rational(1), {A("c", "x"), B("a", "y")}}};
    CHECK_THROWS_AS(evaluate_on_dataset(e, quantum), DataError);
  }
}
