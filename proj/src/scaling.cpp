#include "pamlab/scaling.hpp"

#include <cmath>

#include "pamlab/errors.hpp"

namespace pamlab {

namespace {
constexpr double kCriticalTol = 1e-12;
}

std::string to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::Sub1: return "Sub1";
    case RegimeTag::Sub2: return "Sub2";
    case RegimeTag::Sub3: return "Sub3";
    case RegimeTag::Crt1: return "Crt1";
    case RegimeTag::Crt2: return "Crt2";
    case RegimeTag::Sup: return "Sup";
  }
  return "?";
}

RegimeTag regime_tag_from_string(const std::string& s) {
  for (RegimeTag t : {RegimeTag::Sub1, RegimeTag::Sub2, RegimeTag::Sub3, RegimeTag::Crt1, RegimeTag::Crt2,
                      RegimeTag::Sup})
    if (to_string(t) == s) return t;
  throw InvalidArgument("unknown regime '" + s + "'");
}

Regime classify_regime(double omega, PowerLaw e_seq, PowerLaw t_seq) {
  if (!(omega > 0.0)) throw InvalidArgument("omega must be positive");
  if (!(e_seq.coef > 0.0) || e_seq.coef > 1.0)
    throw UnclassifiableSequence("e(m) = a m^{-u} needs 0 < a <= 1 so that sup e <= 1");
  if (!(t_seq.coef > 0.0)) throw UnclassifiableSequence("t(m) = b m^{v} needs b > 0 so that inf t > 0");
  if (e_seq.exponent < 0.0 || t_seq.exponent < 0.0)
    throw UnclassifiableSequence("sequence exponents must be >= 0");

  const double u = e_seq.exponent;
  const double v = t_seq.exponent;
  Regime r;
  if (std::abs(omega - 2.0) <= kCriticalTol) {
    if (v > 0.0) {
      r.tag = RegimeTag::Crt1;
    } else if (u > 0.0) {
      r.tag = RegimeTag::Crt2;
      r.limit_t = t_seq.coef;
    } else {
      throw UnclassifiableSequence("critical regime with bounded t needs e -> 0");
    }
    return r;
  }
  if (omega > 2.0) {
    if (u == 0.0 && v == 0.0) throw UnclassifiableSequence("supercritical regime needs e -> 0 or t -> infinity");
    r.tag = RegimeTag::Sup;
    return r;
  }
  if (v == 0.0) throw UnclassifiableSequence("subcritical regime needs t -> infinity");
  // e t^{1/(2-omega)} = a b^{1/(2-omega)} m^{v/(2-omega) - u}
  const double rate = v / (2.0 - omega) - u;
  if (rate > 0.0) {
    r.tag = RegimeTag::Sub1;
  } else if (rate == 0.0) {
    r.tag = RegimeTag::Sub2;
    r.frak_c = e_seq.coef * std::pow(t_seq.coef, 1.0 / (2.0 - omega));
  } else {
    r.tag = RegimeTag::Sub3;
  }
  return r;
}

ScalingTriple scaling_functions(const Regime& regime, double epsilon, double t, double gamma1_at_0,
                                double omega) {
  if (!(epsilon > 0.0) || !(t > 0.0)) throw InvalidArgument("epsilon and t must be positive");
  ScalingTriple s;
  switch (regime.tag) {
    case RegimeTag::Sub1:
    case RegimeTag::Sup:
      s.alpha = std::pow(epsilon, (2.0 + omega) / 4.0) * std::pow(t, -0.25);
      s.beta = std::pow(epsilon, -(2.0 + omega) / 2.0) * std::pow(t, 1.5);
      s.H = std::pow(epsilon, -omega) * t * t * gamma1_at_0 / 2.0;
      break;
    case RegimeTag::Sub2:
    case RegimeTag::Sub3:
      s.alpha = std::pow(t, -1.0 / (2.0 - omega));
      s.beta = std::pow(t, (4.0 - omega) / (2.0 - omega));
      s.H = 0.0;
      break;
    case RegimeTag::Crt1:
      s.alpha = epsilon * std::pow(t, -0.25);
      s.beta = std::pow(epsilon, -2.0) * std::pow(t, 1.5);
      s.H = std::pow(epsilon, -2.0) * t * t * gamma1_at_0 / 2.0;
      break;
    case RegimeTag::Crt2:
      s.alpha = epsilon;
      s.beta = std::pow(epsilon, -2.0) * t;
      s.H = 0.0;
      break;
  }
  return s;
}

double predicted_log_moment(const Regime& regime, double p, double t, double epsilon, double chi_p,
                            double gamma1_at_0, double omega) {
  const ScalingTriple s = scaling_functions(regime, epsilon, p * t, gamma1_at_0, omega);
  return s.H - s.beta * chi_p;
}

nlohmann::json to_json(const Regime& regime) {
  nlohmann::json j{{"tag", to_string(regime.tag)}};
  if (regime.tag == RegimeTag::Sub2) j["frak_c"] = regime.frak_c;
  if (regime.tag == RegimeTag::Crt2) j["limit_t"] = regime.limit_t;
  return j;
}

nlohmann::json to_json(const ScalingTriple& triple) {
  return {{"alpha", triple.alpha}, {"beta", triple.beta}, {"H", triple.H}};
}

} // namespace pamlab
