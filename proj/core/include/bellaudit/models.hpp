#pragma once

#include <string>
#include <utility>

#include "bellaudit/core_model.hpp"
#include "bellaudit/rng.hpp"

namespace bellaudit {

enum class ModelKind { QuantumSampler, DeterministicSign, TimeTag };

/// Spin: outcome functions have period 2*pi in the setting angle.
/// Polarization: period pi; angles are doubled before use.
enum class Encoding { Spin, Polarization };

std::string model_name(ModelKind k);
ModelKind parse_model_kind(const std::string& name);
std::string encoding_name(Encoding e);
Encoding parse_encoding(const std::string& name);

/// Shared hidden state of one emitted pair.
struct HiddenState {
  double angle = 0.0;   // [0, 2*pi)
  double aux_a = 0.0;   // [0, 1), delay randomness at station A
  double aux_b = 0.0;   // [0, 1), delay randomness at station B

  static HiddenState draw(StreamRng& rng);
  bool valid() const;
};

struct ModelConfig {
  ModelKind kind = ModelKind::QuantumSampler;
  Encoding encoding = Encoding::Spin;
  double delay_max = 1.0;       // T_max, seconds
  double delay_exponent = 2.0;  // d
  double base_interval = 10.0;  // seconds between emissions

  /// Throws ConfigError when a parameter is out of range.
  void validate() const;
};

/// Angle as seen by the outcome functions: theta (spin) or 2*theta (polarization).
double encoded_angle(double theta, Encoding e);

struct OutcomePair {
  Outcome a = Outcome::plus();
  Outcome b = Outcome::plus();
};

struct TimedOutcomes {
  Outcome a = Outcome::plus();
  Outcome b = Outcome::plus();
  double delay_a = 0.0;
  double delay_b = 0.0;
};

/// Singlet sampler: P(A=x, B=y) = (1 - x*y*c)/4 with c = a.b (spin) or
/// cos 2(theta_a - theta_b) (polarization). E[AB] = -c.
OutcomePair sample_quantum(const Setting& a, const Setting& b, StreamRng& rng,
                           Encoding enc = Encoding::Spin);

/// Locally causal sign model: A = sign(cos(phi_a - phi_l)),
/// B = -sign(cos(phi_b - phi_l)) with phi the encoded angles; sign(0) = +1.
OutcomePair sample_deterministic(const Setting& a, const Setting& b, const HiddenState& lambda,
                                 Encoding enc = Encoding::Spin);

/// Deterministic outcomes plus detection delays
/// tau = T_max * r * |sin(phi_station - phi_lambda_station)|^d, where the B
/// station sees the hidden angle rotated by half a period.
TimedOutcomes sample_timetag(const Setting& a, const Setting& b, const HiddenState& lambda,
                             const ModelConfig& cfg);

}  // namespace bellaudit
