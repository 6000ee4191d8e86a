#include "bellaudit/stats.hpp"

#include <cmath>

#include "bellaudit/errors.hpp"

namespace bellaudit {

void PairCounts::add(Outcome a, Outcome b) {
  if (a.value() > 0) {
    (b.value() > 0 ? n_pp : n_pm) += 1;
  } else {
    (b.value() > 0 ? n_mp : n_mm) += 1;
  }
}

PairCounts& PairCounts::operator+=(const PairCounts& o) {
  n_pp += o.n_pp;
  n_pm += o.n_pm;
  n_mp += o.n_mp;
  n_mm += o.n_mm;
  return *this;
}

Estimate estimate_correlation(const PairCounts& counts) {
  const auto total = counts.total();
  if (total == 0) throw DataError("no matched trials for this pair");
  const double n = static_cast<double>(total);
  const double e = (static_cast<double>(counts.n_pp + counts.n_mm) -
                    static_cast<double>(counts.n_pm + counts.n_mp)) / n;
  return {e, std::sqrt(std::max(0.0, 1.0 - e * e) / n)};
}

PairCounts count_pair(const Dataset& d, const std::string& setting_a, const std::string& setting_b) {
  PairCounts c;
  for (const auto& t : d.trials) {
    if (t.matched && t.event_a.setting == setting_a && t.event_b.setting == setting_b) {
      c.add(t.event_a.outcome, t.event_b.outcome);
    }
  }
  return c;
}

PairCounts count_coincidences(const Dataset& d, const std::vector<CoincidencePair>& pairs,
                              const std::string& setting_a, const std::string& setting_b) {
  PairCounts c;
  for (const auto& p : pairs) {
    const auto& ea = d.trials[p.trial_a].event_a;
    const auto& eb = d.trials[p.trial_b].event_b;
    if (ea.setting == setting_a && eb.setting == setting_b) c.add(ea.outcome, eb.outcome);
  }
  return c;
}

}  // namespace bellaudit
