#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pamlab/errors.hpp"
#include "pamlab/noise.hpp"
#include "pamlab/rng.hpp"

using namespace pamlab;

TEST_CASE("samples are reproducible per (seed, replica)") {
  const MollifiedKernelSpec mk{KernelSpec::riesz(2, 1.0), 0.5};
  const Grid g(2, 4.0, 32);
  const Field a = sample_noise(mk, g, 11, 3);
  const Field b = sample_noise(mk, g, 11, 3);
  const Field c = sample_noise(mk, g, 11, 4);
  CHECK(l2_distance(a, b) == 0.0);
  CHECK(l2_distance(a, c) > 0.0);
}

TEST_CASE("sampler needs a power-of-two grid") {
  CHECK_THROWS_AS(NoiseSampler({KernelSpec::white(1), 1.0}, Grid(1, 4.0, 48)), InvalidArgument);
}

TEST_CASE("pointwise variance matches the mollified kernel at zero") {
  for (const KernelSpec& k : {KernelSpec::white(1), KernelSpec::riesz(1, 0.5), KernelSpec::white(2)}) {
    const MollifiedKernelSpec mk{k, 0.8};
    const Grid g(k.dimension, 8.0, k.dimension == 1 ? 128 : 64);
    NoiseSampler s(mk, g);
    const double exact = mollified_gamma(mk, std::vector<double>(k.dimension, 0.0));
    // the Riesz spectrum is truncated at the torus scale, which removes a little long-range variance
    CHECK(s.pointwise_variance() == doctest::Approx(exact).epsilon(k.family == KernelFamily::White ? 1e-8 : 0.05));
  }
}

TEST_CASE("empirical covariance follows the mollified kernel") {
  const MollifiedKernelSpec mk{KernelSpec::white(1), 1.0};
  const Grid g(1, 8.0, 64);
  NoiseSampler s(mk, g);
  const int n = 4000;
  const std::size_t i0 = 32;
  std::vector<double> cov(5, 0.0);
  for (int r = 0; r < n; ++r) {
    const Field f = s.sample(5, r);
    for (int lag = 0; lag < 5; ++lag) cov[lag] += f[i0] * f[i0 + lag];
  }
  for (int lag = 0; lag < 5; ++lag) {
    const double x = lag * g.spacing();
    const double exact = mollified_gamma(mk, std::vector<double>{x});
    CHECK(cov[lag] / n == doctest::Approx(exact).epsilon(0.08));
  }
}

TEST_CASE("zero intensity gives the zero field") {
  const Field f = sample_noise({KernelSpec::white(2, 0.0), 0.5}, Grid(2, 2.0, 16), 1);
  CHECK(f.max() == 0.0);
  CHECK(f.min() == 0.0);
}

TEST_CASE("identity rescaling leaves the sample unchanged") {
  const MollifiedKernelSpec mk{KernelSpec::riesz(1, 0.5), 0.5};
  const Grid g(1, 4.0, 128);
  const Field f = sample_noise(mk, g, 9);
  RescaledNoiseParams p;
  const Field r = rescale_noise(f, p);
  CHECK(l2_distance(f, r) < 1e-12);
}

TEST_CASE("rescaling applies alpha^2 (xi(alpha x) - H / pt)") {
  const Grid g(1, 4.0, 128);
  const Field f = Field::from_function(g, [](const Point& x) { return 1.0 + 0.5 * x[0]; });
  RescaledNoiseParams p;
  p.alpha = 0.5;
  p.H = 3.0;
  p.p = 2.0;
  p.t = 1.5;
  const Field r = rescale_noise(f, p, Grid(1, 6.0, 64));
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double x = r.grid().point(k)[0];
    CHECK(r[k] == doctest::Approx(0.25 * (1.0 + 0.25 * x - 1.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(rescale_noise(f, p, Grid(1, 9.0, 64)), DomainTooSmall);
}

TEST_CASE("rescaling parameters follow the regime row") {
  Regime crt2;
  crt2.tag = RegimeTag::Crt2;
  crt2.limit_t = 2.0;
  const auto p = RescaledNoiseParams::from_regime(crt2, 1.0, 2.0, 0.1, 1.0, 2.0);
  CHECK(p.alpha == doctest::Approx(0.1));
  CHECK(p.H == 0.0);
}

TEST_CASE("linear functional moment generating function") {
  const MollifiedKernelSpec mk{KernelSpec::white(1), 1.0};
  DiscreteMeasure mu;
  mu.points = {{0.0}, {0.5}, {-1.0}};
  mu.weights = {1.0, -0.5, 0.25};
  const double var = linear_functional_variance(mk, mu);
  double expect = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      expect += mu.weights[i] * mu.weights[j] *
                mollified_gamma(mk, std::vector<double>{mu.points[i][0] - mu.points[j][0]});
  CHECK(var == doctest::Approx(expect));
  CHECK(mgf_linear_functional(mk, mu, 1.7) == doctest::Approx(std::exp(1.7 * 1.7 * var / 2.0)));
  CHECK(mgf_linear_functional(mk, mu, 0.0) == 1.0);
}
