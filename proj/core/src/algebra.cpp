#include "bellaudit/algebra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "bellaudit/errors.hpp"

namespace bellaudit {

ReducedExpression reduce(const Expression& e, const ConstraintSet& c) {
  e.validate();
  ReducedExpression r;
  std::vector<std::pair<Rational, std::vector<Variable>>> mapped;
  for (const auto& t : e.terms) {
    Rational coeff = t.coeff;
    std::vector<Variable> factors;
    for (auto v : t.factors) {
      if (c.anticorrelation && v.station == Station::B) {
        v.station = Station::A;
        coeff = -coeff;
      }
      factors.push_back(std::move(v));
    }
    mapped.emplace_back(coeff, std::move(factors));
  }
  for (const auto& [coeff, factors] : mapped) {
    r.variables.insert(r.variables.end(), factors.begin(), factors.end());
  }
  std::sort(r.variables.begin(), r.variables.end());
  r.variables.erase(std::unique(r.variables.begin(), r.variables.end()), r.variables.end());
  for (auto& [coeff, factors] : mapped) {
    ReducedExpression::Term t{coeff, {}};
    for (const auto& v : factors) {
      t.factors.push_back(static_cast<std::size_t>(
          std::lower_bound(r.variables.begin(), r.variables.end(), v) - r.variables.begin()));
    }
    r.terms.push_back(std::move(t));
  }
  return r;
}

std::vector<Variable> distinct_variables(const Expression& e, const ConstraintSet& c) {
  return reduce(e, c).variables;
}

namespace {

struct IntegerTerm {
  std::int64_t coeff;
  std::vector<std::size_t> odd_vars;  // variables with odd multiplicity
};

// Coefficients scaled to a common denominator.
std::pair<std::vector<IntegerTerm>, std::int64_t> integerize(const ReducedExpression& r) {
  std::int64_t lcm = 1;
  for (const auto& t : r.terms) {
    const std::int64_t den = t.coeff.denominator();
    if (__builtin_mul_overflow(lcm / std::gcd(lcm, den), den, &lcm)) {
      throw GuardExceeded("coefficient denominators too large for exact enumeration");
    }
  }
  std::vector<IntegerTerm> out;
  std::int64_t abs_sum = 0;
  for (const auto& t : r.terms) {
    std::int64_t k = 0;
    if (__builtin_mul_overflow(t.coeff.numerator(), lcm / t.coeff.denominator(), &k) ||
        __builtin_add_overflow(abs_sum, k < 0 ? -k : k, &abs_sum) || abs_sum > (std::int64_t{1} << 61)) {
      throw GuardExceeded("coefficients too large for exact enumeration");
    }
    std::map<std::size_t, int> mult;
    for (auto f : t.factors) mult[f] ^= 1;
    IntegerTerm it{k, {}};
    for (auto [v, odd] : mult) {
      if (odd) it.odd_vars.push_back(v);
    }
    out.push_back(std::move(it));
  }
  return {std::move(out), lcm};
}

struct MinMax {
  std::int64_t min = std::numeric_limits<std::int64_t>::max();
  std::int64_t max = std::numeric_limits<std::int64_t>::min();
  void take(std::int64_t v) {
    min = std::min(min, v);
    max = std::max(max, v);
  }
  void merge(const MinMax& o) {
    min = std::min(min, o.min);
    max = std::max(max, o.max);
  }
};

// Enumerates the low `low_bits` variables in Gray-code order with the high
// variables fixed by `prefix`. Bit k set means variable k is -1.
MinMax enumerate_block(const std::vector<IntegerTerm>& terms,
                       const std::vector<std::vector<std::size_t>>& touching, std::size_t low_bits,
                       std::uint64_t prefix) {
  std::vector<std::int64_t> value(terms.size());
  std::int64_t total = 0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    int sign = 1;
    for (auto v : terms[t].odd_vars) {
      if (v >= low_bits && ((prefix >> (v - low_bits)) & 1U)) sign = -sign;
    }
    value[t] = sign * terms[t].coeff;
    total += value[t];
  }
  MinMax mm;
  mm.take(total);
  const std::uint64_t count = std::uint64_t{1} << low_bits;
  for (std::uint64_t g = 1; g < count; ++g) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(g));
    for (auto t : touching[bit]) {
      total -= 2 * value[t];
      value[t] = -value[t];
    }
    mm.take(total);
  }
  return mm;
}

}  // namespace

namespace {

// Exhaustive min/max of a sum of integer terms over `nvars` variables.
MinMax enumerate_all(const std::vector<IntegerTerm>& terms, std::size_t nvars, unsigned threads) {
  std::vector<std::vector<std::size_t>> touching(nvars);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    for (auto v : terms[t].odd_vars) touching[v].push_back(t);
  }

  std::size_t high_bits = 0;
  while (high_bits < nvars && high_bits < 6 && (std::size_t{1} << high_bits) < 4 * threads &&
         nvars - high_bits > 16) {
    ++high_bits;
  }
  const std::size_t low_bits = nvars - high_bits;
  const std::uint64_t blocks = std::uint64_t{1} << high_bits;

  std::vector<MinMax> partial(blocks);
  auto run = [&](std::uint64_t first, std::uint64_t step) {
    for (std::uint64_t b = first; b < blocks; b += step) {
      partial[b] = enumerate_block(terms, touching, low_bits, b);
    }
  };
  if (threads == 1 || blocks == 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> pool;
    const unsigned n = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(run, t, n);
  }
  MinMax all;
  for (const auto& p : partial) all.merge(p);
  return all;
}

}  // namespace

Bounds tight_bounds(const Expression& e, const ConstraintSet& c, unsigned threads) {
  const ReducedExpression r = reduce(e, c);
  const std::size_t nvars = r.variables.size();
  if (nvars > kMaxEnumerationVariables) {
    throw GuardExceeded("expression has " + std::to_string(nvars) +
                        " distinct variables; enumeration is limited to " +
                        std::to_string(kMaxEnumerationVariables));
  }
  if (r.terms.empty()) return {};
  const auto [terms, scale] = integerize(r);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  // Terms that share no variables can be optimized independently, so the
  // bounds are sums over connected components (constant terms add to both).
  std::vector<std::size_t> comp(nvars);
  std::iota(comp.begin(), comp.end(), std::size_t{0});
  auto root = [&](std::size_t x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  for (const auto& t : terms) {
    for (std::size_t k = 1; k < t.odd_vars.size(); ++k) comp[root(t.odd_vars[k])] = root(t.odd_vars[0]);
  }
  std::map<std::size_t, std::vector<IntegerTerm>> groups;
  std::int64_t constant = 0;
  for (const auto& t : terms) {
    if (t.odd_vars.empty()) constant += t.coeff;
    else groups[root(t.odd_vars[0])].push_back(t);
  }

  std::int64_t lo = constant;
  std::int64_t hi = constant;
  for (auto& [id, group] : groups) {
    std::map<std::size_t, std::size_t> local;
    for (auto& t : group) {
      for (auto& v : t.odd_vars) v = local.emplace(v, local.size()).first->second;
    }
    const MinMax mm = enumerate_all(group, local.size(), threads);
    lo += mm.min;
    hi += mm.max;
  }
  return {Rational(lo, scale), Rational(hi, scale)};
}

bool all_pairwise(const Expression& e) {
  return std::all_of(e.terms.begin(), e.terms.end(), [](const Term& t) { return t.factors.size() == 2; });
}

namespace {

// Union-find over vertices with the parity of each vertex relative to its
// root; an edge (u, v, p) asks for parity(u) xor parity(v) == p.
class ParityUnionFind {
 public:
  explicit ParityUnionFind(std::size_t n) : parent_(n), parity_(n, 0), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::pair<std::size_t, int> find(std::size_t x) {
    int acc = 0;
    std::size_t root = x;
    while (parent_[root] != root) {
      acc ^= parity_[root];
      root = parent_[root];
    }
    // Path compression, rewriting each node's parity relative to the root.
    int remaining = acc;
    while (parent_[x] != root) {
      const std::size_t next = parent_[x];
      const int p = parity_[x];
      parent_[x] = root;
      parity_[x] = remaining;
      remaining ^= p;
      x = next;
    }
    return {root, acc};
  }

  // Returns false when the edge contradicts the component's parities.
  bool unite(std::size_t u, std::size_t v, int p, bool& merged) {
    auto [ru, pu] = find(u);
    auto [rv, pv] = find(v);
    merged = false;
    if (ru == rv) return (pu ^ pv) == p;
    if (rank_[ru] < rank_[rv]) std::swap(ru, rv);
    parent_[rv] = ru;
    parity_[rv] = pu ^ pv ^ p;
    if (rank_[ru] == rank_[rv]) ++rank_[ru];
    merged = true;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> parity_;
  std::vector<int> rank_;
};

std::vector<std::size_t> forest_path(const std::vector<std::vector<std::size_t>>& adj, std::size_t from,
                                     std::size_t to) {
  std::vector<std::size_t> prev(adj.size(), adj.size());
  std::deque<std::size_t> queue{from};
  prev[from] = from;
  while (!queue.empty()) {
    const auto x = queue.front();
    queue.pop_front();
    if (x == to) break;
    for (auto y : adj[x]) {
      if (prev[y] == adj.size()) {
        prev[y] = x;
        queue.push_back(y);
      }
    }
  }
  std::vector<std::size_t> path{to};
  while (path.back() != from) path.push_back(prev[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

// Rotates a closed walk to start at its smallest vertex, then orients it
// toward the smaller neighbour.
std::vector<std::size_t> normalize_cycle(std::vector<std::size_t> cycle) {
  cycle.pop_back();
  const auto it = std::min_element(cycle.begin(), cycle.end());
  std::rotate(cycle.begin(), it, cycle.end());
  if (cycle.size() > 2 && cycle.back() < cycle[1]) std::reverse(cycle.begin() + 1, cycle.end());
  cycle.push_back(cycle.front());
  return cycle;
}

std::optional<std::vector<std::size_t>> find_frustration(const ReducedExpression& r, bool for_max) {
  const std::size_t n = r.variables.size();
  ParityUnionFind uf(n);
  std::vector<std::vector<std::size_t>> tree(n);
  for (const auto& t : r.terms) {
    const std::size_t u = t.factors[0];
    const std::size_t v = t.factors[1];
    const bool positive = t.coeff > Rational(0);
    // Reaching +|c| needs s_u s_v = sign(c); reaching -|c| needs the opposite.
    const int p = (positive == for_max) ? 0 : 1;
    if (u == v) {
      if (p == 1) return std::vector<std::size_t>{u, u};
      continue;
    }
    bool merged = false;
    if (!uf.unite(u, v, p, merged)) {
      auto cycle = forest_path(tree, u, v);
      cycle.push_back(u);
      return normalize_cycle(std::move(cycle));
    }
    if (merged) {
      tree[u].push_back(v);
      tree[v].push_back(u);
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::vector<Variable>> frustrated_cycle(const Expression& e, const ConstraintSet& c) {
  if (!all_pairwise(e)) throw ConfigError("graph cycle check needs pairwise products only");
  const ReducedExpression r = reduce(e, c);
  auto found = find_frustration(r, true);
  if (!found) found = find_frustration(r, false);
  if (!found) return std::nullopt;
  std::vector<Variable> out;
  for (auto i : *found) out.push_back(r.variables[i]);
  return out;
}

CyclicityReport has_cyclicity(const Expression& e, const ConstraintSet& c) {
  CyclicityReport rep;
  rep.tight = tight_bounds(e, c);
  rep.trivial = e.trivial_bound();
  rep.cyclic = rep.tight.min > -rep.trivial || rep.tight.max < rep.trivial;
  if (rep.cyclic && all_pairwise(e)) rep.witness = frustrated_cycle(e, c);
  return rep;
}

Expression decyclify(const Expression& e, std::uint64_t start_index) {
  Expression out = e;
  std::uint64_t k = start_index;
  for (auto& t : out.terms) {
    for (auto& f : t.factors) f.st = "st_" + std::to_string(k++);
  }
  const Rational trivial = out.trivial_bound();
  out.stated_bound = out.comparison == Comparison::GreaterEqual ? -trivial : trivial;
  return out;
}

namespace {

struct TermPlan {
  std::string setting_a;
  std::string setting_b;
  int sign = 1;
};

TermPlan plan_term(const Term& t, std::size_t index, const Binding& binding) {
  auto fail = [&](const std::string& why) -> TermPlan {
    throw DataError("term " + std::to_string(index) + " is not measurable as one coincidence pair: " + why);
  };
  if (t.factors.size() != 2) return fail("needs exactly two factors");
  const auto& x = t.factors[0];
  const auto& y = t.factors[1];
  if (x.station != y.station) {
    const auto& a = x.station == Station::A ? x : y;
    const auto& b = x.station == Station::A ? y : x;
    return {a.setting, b.setting, 1};
  }
  if (!binding.anticorrelation) return fail("both factors at station " + std::string(1, station_char(x.station)));
  // A_x A_y = -A_x B_y (and B_x B_y = -A_x B_y) under perfect anticorrelation.
  return {x.setting, y.setting, -1};
}

}  // namespace

ExpressionEvaluation evaluate_on_dataset(const Expression& e, const Dataset& d, const Binding& binding) {
  e.validate();

  // One space-time label cannot carry two settings at the same station;
  // unlabeled factors all share one label.
  std::map<std::pair<std::optional<std::string>, Station>, std::set<std::string>> bound;
  for (const auto& t : e.terms) {
    for (const auto& f : t.factors) bound[{f.st, f.station}].insert(f.setting);
  }
  for (const auto& [key, settings] : bound) {
    if (settings.size() > 1) {
      std::string list;
      for (const auto& s : settings) list += (list.empty() ? "" : ", ") + s;
      const std::string label = key.first ? "label " + *key.first : "the shared (unlabeled) lambda";
      throw IncompatibleMeasurements(label + " needs settings {" + list + "} at station " +
                                     std::string(1, station_char(key.second)) +
                                     " in one trial; each EPR trial records one setting per station");
    }
  }

  ExpressionEvaluation ev;
  double var = 0.0;
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    const auto plan = plan_term(e.terms[i], i, binding);
    TermEstimate te;
    te.coeff = e.terms[i].coeff;
    te.sign = plan.sign;
    te.setting_a = plan.setting_a;
    te.setting_b = plan.setting_b;
    for (const auto& t : d.trials) {
      if (!t.matched || t.event_a.setting != plan.setting_a || t.event_b.setting != plan.setting_b) continue;
      te.counts.add(t.event_a.outcome, t.event_b.outcome);
      if (binding.keep_per_trial) {
        te.per_trial.emplace_back(t.trial_index, t.event_a.outcome.value() * t.event_b.outcome.value());
      }
    }
    if (te.counts.total() == 0) {
      throw DataError("no matched trials for setting pair (" + plan.setting_a + "," + plan.setting_b + ")");
    }
    te.estimate = estimate_correlation(te.counts);
    const double w = boost::rational_cast<double>(te.coeff) * plan.sign;
    te.contribution = w * te.estimate.value;
    ev.value += te.contribution;
    var += w * w * te.estimate.std_error * te.estimate.std_error;
    ev.terms.push_back(std::move(te));
  }
  ev.std_error = std::sqrt(var);
  return ev;
}

}  // namespace bellaudit
