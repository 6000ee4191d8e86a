#include "bellaudit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "bellaudit/errors.hpp"

namespace bellaudit {

Schedule Schedule::uniform(std::vector<SettingPair> allowed) {
  Schedule s;
  s.allowed = std::move(allowed);
  return s;
}

Schedule Schedule::fixed(std::vector<SettingPair> pairs) {
  Schedule s;
  s.allowed = pairs;
  std::sort(s.allowed.begin(), s.allowed.end());
  s.allowed.erase(std::unique(s.allowed.begin(), s.allowed.end()), s.allowed.end());
  s.explicit_pairs = std::move(pairs);
  return s;
}

Schedule Schedule::bell_triple(const std::vector<Setting>& settings) {
  if (settings.size() < 3) throw ConfigError("bell triple schedule needs three settings");
  const auto& a = settings[0].label();
  const auto& b = settings[1].label();
  const auto& c = settings[2].label();
  return uniform({{a, b}, {a, c}, {b, c}});
}

void Schedule::validate(const std::vector<Setting>& settings) const {
  if (allowed.empty()) throw ConfigError("schedule has no allowed setting pairs");
  auto known = [&](const std::string& l) {
    return std::any_of(settings.begin(), settings.end(), [&](const Setting& s) { return s.label() == l; });
  };
  for (const auto& [x, y] : allowed) {
    if (!known(x)) throw ConfigError("schedule references unknown setting '" + x + "'");
    if (!known(y)) throw ConfigError("schedule references unknown setting '" + y + "'");
  }
  for (const auto& p : explicit_pairs) {
    if (std::find(allowed.begin(), allowed.end(), p) == allowed.end()) {
      throw ConfigError("scheduled pair (" + p.first + "," + p.second + ") is not allowed");
    }
  }
}

CoincidenceWindow CoincidenceWindow::of(double width) {
  if (std::isinf(width) && width > 0) return infinite();
  if (!(width > 0.0)) throw ConfigError("coincidence window must be > 0");
  CoincidenceWindow w;
  w.width_ = width;
  return w;
}

double CoincidenceWindow::width() const {
  return width_ ? *width_ : std::numeric_limits<double>::infinity();
}

namespace {

TrialRecord generate_trial(const ModelConfig& model, const Setting& sa, const Setting& sb,
                           std::uint64_t index, StreamRng& rng) {
  const double emitted = static_cast<double>(index) * model.base_interval;
  switch (model.kind) {
    case ModelKind::QuantumSampler: {
      const auto o = sample_quantum(sa, sb, rng, model.encoding);
      return make_trial(index, sa.label(), o.a, emitted, sb.label(), o.b, emitted);
    }
    case ModelKind::DeterministicSign: {
      const auto o = sample_deterministic(sa, sb, HiddenState::draw(rng), model.encoding);
      return make_trial(index, sa.label(), o.a, emitted, sb.label(), o.b, emitted);
    }
    case ModelKind::TimeTag: {
      const auto o = sample_timetag(sa, sb, HiddenState::draw(rng), model);
      return make_trial(index, sa.label(), o.a, emitted + o.delay_a, sb.label(), o.b,
                        emitted + o.delay_b);
    }
  }
  throw ConfigError("unhandled model kind");
}

}  // namespace

Dataset run_experiment(const ModelConfig& model, const std::vector<Setting>& settings,
                       const Schedule& schedule, std::uint64_t n, std::uint64_t seed,
                       RunOptions opts) {
  model.validate();
  if (n < 1) throw ConfigError("trial count must be >= 1");
  schedule.validate(settings);

  Dataset d;
  d.settings = settings;
  d.metadata.seed = seed;
  d.metadata.model = model_name(model.kind);
  d.trials.resize(n);

  // Resolve labels once; the hot loop works on indices.
  std::vector<std::pair<const Setting*, const Setting*>> allowed;
  for (const auto& [x, y] : schedule.allowed) allowed.emplace_back(&d.setting(x), &d.setting(y));
  std::vector<std::size_t> explicit_idx;
  for (const auto& p : schedule.explicit_pairs) {
    explicit_idx.push_back(static_cast<std::size_t>(
        std::find(schedule.allowed.begin(), schedule.allowed.end(), p) - schedule.allowed.begin()));
  }

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t k = begin; k < end; ++k) {
      StreamRng rng(seed, k);
      std::size_t pick = 0;
      if (!explicit_idx.empty()) {
        pick = explicit_idx[k % explicit_idx.size()];
      } else if (allowed.size() > 1) {
        pick = rng.below(allowed.size());
      }
      d.trials[k] = generate_trial(model, *allowed[pick].first, *allowed[pick].second, k, rng);
    }
  };

  const unsigned threads = std::max(1u, opts.threads);
  if (threads == 1 || n < 2 * threads) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t b = t * chunk;
      const std::uint64_t e = std::min<std::uint64_t>(n, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }
  return d;
}

CoincidenceIndex::CoincidenceIndex(const Dataset& d) {
  const std::size_t n = d.trials.size();
  auto sorted_stream = [&](bool station_a, std::vector<std::size_t>& idx, std::vector<double>& times) {
    auto time = [&](std::size_t i) {
      return station_a ? d.trials[i].event_a.time_tag : d.trials[i].event_b.time_tag;
    };
    idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return time(x) < time(y); });
    times.resize(n);
    for (std::size_t i = 0; i < n; ++i) times[i] = time(idx[i]);
  };
  sorted_stream(true, a_, ta_);
  sorted_stream(false, b_, tb_);
}

std::vector<CoincidencePair> CoincidenceIndex::match(const CoincidenceWindow& w, MatchMode mode) const {
  std::vector<CoincidencePair> pairs;
  const std::size_t n = a_.size();
  if (w.is_infinite()) {
    pairs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pairs.push_back({i, i});
    return pairs;
  }
  const double width = w.width();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n && j < n) {
    if (std::abs(ta_[i] - tb_[j]) < width) {
      if (mode == MatchMode::Nearest || a_[i] == b_[j]) pairs.push_back({a_[i], b_[j]});
      ++i;
      ++j;
    } else if (ta_[i] <= tb_[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return pairs;
}

std::vector<CoincidencePair> find_coincidences(const Dataset& d, const CoincidenceWindow& w,
                                               MatchMode mode) {
  if (w.is_infinite()) {
    std::vector<CoincidencePair> pairs(d.trials.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i] = {i, i};
    return pairs;
  }
  return CoincidenceIndex(d).match(w, mode);
}

Dataset match_coincidences(const Dataset& d, const CoincidenceWindow& w, MatchMode mode) {
  Dataset out = d;
  for (auto& t : out.trials) t.matched = false;
  for (const auto& p : find_coincidences(d, w, mode)) {
    if (p.trial_a == p.trial_b) out.trials[p.trial_a].matched = true;
  }
  out.metadata.window = w.as_optional();
  return out;
}

std::vector<double> log_window_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi >= lo) || per_decade < 1) {
    throw ConfigError("window grid needs 0 < lo <= hi and per_decade >= 1");
  }
  const double decades = std::log10(hi / lo);
  const auto steps = static_cast<long>(std::ceil(decades * per_decade - 1e-9));
  std::vector<double> grid;
  for (long k = 0; k <= steps; ++k) {
    grid.push_back(std::max(lo, hi * std::pow(10.0, -static_cast<double>(k) / per_decade)));
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace bellaudit
