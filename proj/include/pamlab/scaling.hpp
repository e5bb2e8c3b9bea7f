#pragma once

#include <string>

#include <json.hpp>

namespace pamlab {

enum class RegimeTag { Sub1, Sub2, Sub3, Crt1, Crt2, Sup };

std::string to_string(RegimeTag tag);
RegimeTag regime_tag_from_string(const std::string& s);

struct Regime {
  RegimeTag tag = RegimeTag::Sub1;
  double frak_c = 0.0;   // lim e t^{1/(2-omega)}, Sub2 only
  double limit_t = 0.0;  // limiting time, Crt2 only
};

/// Power-law sequence coef * m^{exponent} of the master parameter m >= 1.
struct PowerLaw {
  double coef = 1.0;
  double exponent = 0.0;
};

/// e(m) = a m^{-u}: pass {a, u}.  t(m) = b m^{v}: pass {b, v}.
/// Requires a <= 1, b > 0, u, v >= 0. Throws UnclassifiableSequence when the
/// limits fit none of the Sub / Crt / Sup cases.
Regime classify_regime(double omega, PowerLaw e_seq, PowerLaw t_seq);

struct ScalingTriple {
  double alpha = 0.0;
  double beta = 0.0;
  double H = 0.0;
};

/// alpha_eps(t), beta_eps(t), H_eps(t); `t` is the time argument as it
/// enters the table (callers pass p*t for the p-th moment).
ScalingTriple scaling_functions(const Regime& regime, double epsilon, double t, double gamma1_at_0,
                                double omega);

/// H_eps(pt) - beta_eps(pt) * chi_p.
double predicted_log_moment(const Regime& regime, double p, double t, double epsilon, double chi_p,
                            double gamma1_at_0, double omega);

nlohmann::json to_json(const Regime& regime);
nlohmann::json to_json(const ScalingTriple& triple);

} // namespace pamlab
