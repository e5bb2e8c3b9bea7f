#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pamlab/errors.hpp"
#include "pamlab/scaling.hpp"

using namespace pamlab;

TEST_CASE("classification of power-law sequences") {
  Regime r = classify_regime(1.0, {1.0, 1.0}, {1.0, 1.0});
  CHECK(r.tag == RegimeTag::Sub2);
  CHECK(r.frak_c == doctest::Approx(1.0));
  CHECK(classify_regime(1.0, {1.0, 0.0}, {1.0, 1.0}).tag == RegimeTag::Sub1);
  CHECK(classify_regime(1.0, {1.0, 2.0}, {1.0, 1.0}).tag == RegimeTag::Sub3);
  CHECK(classify_regime(3.0, {1.0, 1.0}, {1.0, 0.0}).tag == RegimeTag::Sup);
  CHECK(classify_regime(2.0, {1.0, 1.0}, {1.0, 1.0}).tag == RegimeTag::Crt1);
  r = classify_regime(2.0, {1.0, 1.0}, {3.0, 0.0});
  CHECK(r.tag == RegimeTag::Crt2);
  CHECK(r.limit_t == 3.0);
}

TEST_CASE("sequences outside every case are rejected") {
  CHECK_THROWS_AS(classify_regime(2.0, {1.0, 0.0}, {1.0, 0.0}), UnclassifiableSequence);
  CHECK_THROWS_AS(classify_regime(3.0, {1.0, 0.0}, {1.0, 0.0}), UnclassifiableSequence);
  CHECK_THROWS_AS(classify_regime(1.0, {1.0, 1.0}, {1.0, 0.0}), UnclassifiableSequence);
  CHECK_THROWS_AS(classify_regime(1.0, {2.0, 1.0}, {1.0, 1.0}), UnclassifiableSequence);
  CHECK_THROWS_AS(classify_regime(1.0, {1.0, 1.0}, {0.0, 1.0}), UnclassifiableSequence);
}

TEST_CASE("table rows") {
  Regime sub1{RegimeTag::Sub1};
  ScalingTriple s = scaling_functions(sub1, 1.0, 16.0, 1.0, 1.0);
  CHECK(s.alpha == doctest::Approx(0.5));
  CHECK(s.beta == doctest::Approx(64.0));
  CHECK(s.H == doctest::Approx(128.0));

  Regime crt2{RegimeTag::Crt2, 0.0, 2.0};
  s = scaling_functions(crt2, 0.1, 2.0, 1.0, 2.0);
  CHECK(s.alpha == doctest::Approx(0.1));
  CHECK(s.beta == doctest::Approx(200.0));
  CHECK(s.H == 0.0);

  Regime sub3{RegimeTag::Sub3};
  s = scaling_functions(sub3, 0.5, 8.0, 1.0, 1.0);
  CHECK(s.alpha == doctest::Approx(1.0 / 8.0));
  CHECK(s.beta == doctest::Approx(512.0));
  CHECK(s.H == 0.0);
}

TEST_CASE("beta equals t / alpha^2 on every row") {
  for (RegimeTag tag : {RegimeTag::Sub1, RegimeTag::Sub2, RegimeTag::Sub3, RegimeTag::Crt1, RegimeTag::Crt2,
                        RegimeTag::Sup}) {
    const bool crt = tag == RegimeTag::Crt1 || tag == RegimeTag::Crt2;
    const double omega = crt ? 2.0 : (tag == RegimeTag::Sup ? 3.5 : 0.7);
    for (double eps : {0.01, 0.3, 1.0})
      for (double t : {0.5, 3.0, 40.0}) {
        const ScalingTriple s = scaling_functions(Regime{tag, 1.0, 1.0}, eps, t, 0.8, omega);
        CHECK(s.beta == doctest::Approx(t / (s.alpha * s.alpha)).epsilon(1e-12));
        CHECK(s.alpha > 0.0);
      }
  }
}

TEST_CASE("H is the gaussian cumulant where the table says so") {
  const double g1 = 0.37;
  for (RegimeTag tag : {RegimeTag::Sub1, RegimeTag::Crt1, RegimeTag::Sup}) {
    const double omega = tag == RegimeTag::Crt1 ? 2.0 : (tag == RegimeTag::Sup ? 2.5 : 1.2);
    for (double eps : {0.05, 0.5})
      for (double t : {1.0, 7.0}) {
        const double gamma_eps0 = std::pow(eps, -omega) * g1;
        CHECK(scaling_functions(Regime{tag}, eps, t, g1, omega).H ==
              doctest::Approx(t * t * gamma_eps0 / 2.0).epsilon(1e-12));
      }
  }
}

TEST_CASE("Sub-1 terms coalesce at the Sub-2 boundary") {
  // eps = c t^{-1/(2-omega)}: both eps^{-omega} t^2 and eps^{-(2+omega)/2} t^{3/2}
  // scale like t^{(4-omega)/(2-omega)}
  const double omega = 0.8, c = 0.6;
  const double q = (4.0 - omega) / (2.0 - omega);
  auto ratio = [&](double t) {
    const double eps = c * std::pow(t, -1.0 / (2.0 - omega));
    const ScalingTriple s = scaling_functions(Regime{RegimeTag::Sub1}, eps, t, 1.0, omega);
    return std::pair{s.H / std::pow(t, q), s.beta / std::pow(t, q)};
  };
  const auto a = ratio(2.0), b = ratio(50.0);
  CHECK(a.first == doctest::Approx(b.first).epsilon(1e-12));
  CHECK(a.second == doctest::Approx(b.second).epsilon(1e-12));
}

TEST_CASE("predicted log moments") {
  CHECK(predicted_log_moment(Regime{RegimeTag::Sub1}, 1.0, 16.0, 1.0, 0.0, 1.0, 1.0) == doctest::Approx(128.0));
  const double M = 1.0 / 48.0;
  CHECK(predicted_log_moment(Regime{RegimeTag::Sub3}, 1.0, 8.0, 0.1, -M, 1.0, 1.0) == doctest::Approx(512.0 * M));
  const double chi = 0.3;
  CHECK(predicted_log_moment(Regime{RegimeTag::Sub1}, 1.0, 16.0, 1.0, chi, 1.0, 1.0) ==
        doctest::Approx(128.0 - 64.0 * chi));
}

TEST_CASE("regime json records") {
  Regime r{RegimeTag::Sub2, 0.5, 0.0};
  const auto j = to_json(r);
  CHECK(j["tag"] == "Sub2");
  CHECK(j["frak_c"] == 0.5);
  CHECK(regime_tag_from_string("Crt1") == RegimeTag::Crt1);
  CHECK_THROWS_AS(regime_tag_from_string("Sub4"), InvalidArgument);
}
