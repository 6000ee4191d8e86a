#include "bellaudit/models.hpp"

#include <cmath>
#include <numbers>

#include "bellaudit/errors.hpp"

namespace bellaudit {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::string model_name(ModelKind k) {
  switch (k) {
    case ModelKind::QuantumSampler: return "quantum";
    case ModelKind::DeterministicSign: return "deterministic";
    case ModelKind::TimeTag: return "timetag";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "quantum") return ModelKind::QuantumSampler;
  if (name == "deterministic") return ModelKind::DeterministicSign;
  if (name == "timetag") return ModelKind::TimeTag;
  throw ConfigError("unknown model '" + name + "' (expected quantum, deterministic or timetag)");
}

std::string encoding_name(Encoding e) { return e == Encoding::Spin ? "spin" : "polarization"; }

Encoding parse_encoding(const std::string& name) {
  if (name == "spin") return Encoding::Spin;
  if (name == "polarization") return Encoding::Polarization;
  throw ConfigError("unknown encoding '" + name + "' (expected spin or polarization)");
}

HiddenState HiddenState::draw(StreamRng& rng) {
  HiddenState h;
  h.angle = kTwoPi * rng.uniform();
  if (h.angle >= kTwoPi) h.angle = 0.0;
  h.aux_a = rng.uniform();
  h.aux_b = rng.uniform();
  return h;
}

bool HiddenState::valid() const {
  return angle >= 0.0 && angle < kTwoPi && aux_a >= 0.0 && aux_a < 1.0 && aux_b >= 0.0 &&
         aux_b < 1.0;
}

void ModelConfig::validate() const {
  if (!(delay_max > 0.0)) throw ConfigError("delay_max must be > 0");
  if (!(base_interval > 0.0)) throw ConfigError("base_interval must be > 0");
  if (!(delay_exponent >= 0.0)) throw ConfigError("delay_exponent must be >= 0");
}

double encoded_angle(double theta, Encoding e) {
  return e == Encoding::Spin ? theta : 2.0 * theta;
}

OutcomePair sample_quantum(const Setting& a, const Setting& b, StreamRng& rng, Encoding enc) {
  const double c = enc == Encoding::Spin ? a.dot(b) : std::cos(2.0 * (a.angle() - b.angle()));
  const Outcome first = rng.coin(0.5) ? Outcome::plus() : Outcome::minus();
  // P(B = -A) = (1 + c)/2 gives E[AB] = -c with unbiased marginals.
  const bool opposite = rng.coin(0.5 * (1.0 + c));
  return {first, opposite ? -first : first};
}

OutcomePair sample_deterministic(const Setting& a, const Setting& b, const HiddenState& lambda,
                                 Encoding enc) {
  const double phi_l = encoded_angle(lambda.angle, enc);
  const double phi_a = encoded_angle(a.angle(), enc);
  const double phi_b = encoded_angle(b.angle(), enc);
  return {Outcome::sign_of(std::cos(phi_a - phi_l)), -Outcome::sign_of(std::cos(phi_b - phi_l))};
}

TimedOutcomes sample_timetag(const Setting& a, const Setting& b, const HiddenState& lambda,
                             const ModelConfig& cfg) {
  const auto [out_a, out_b] = sample_deterministic(a, b, lambda, cfg.encoding);
  const double phi_la = encoded_angle(lambda.angle, cfg.encoding);
  // Half a period of the outcome function, i.e. pi in encoded angle.
  const double phi_lb = phi_la + std::numbers::pi;
  const double phi_a = encoded_angle(a.angle(), cfg.encoding);
  const double phi_b = encoded_angle(b.angle(), cfg.encoding);
  auto factor = [&](double x) {
    const double s = std::abs(std::sin(x));
    return cfg.delay_exponent == 0.0 ? 1.0 : std::pow(s, cfg.delay_exponent);
  };
  TimedOutcomes t;
  t.a = out_a;
  t.b = out_b;
  t.delay_a = cfg.delay_max * lambda.aux_a * factor(phi_a - phi_la);
  t.delay_b = cfg.delay_max * lambda.aux_b * factor(phi_b - phi_lb);
  return t;
}

}  // namespace bellaudit
