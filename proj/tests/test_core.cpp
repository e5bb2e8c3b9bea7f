#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "pamlab/errors.hpp"
#include "pamlab/fft.hpp"
#include "pamlab/field.hpp"
#include "pamlab/rng.hpp"

using namespace pamlab;

TEST_CASE("grid nodes are cell centres") {
  const Grid g(2, 3.0, 6);
  CHECK(g.spacing() == doctest::Approx(1.0));
  CHECK(g.cell_volume() == doctest::Approx(1.0));
  CHECK(g.size() == 36);
  CHECK(g.coord(0) == doctest::Approx(-2.5));
  CHECK(g.coord(5) == doctest::Approx(2.5));
  std::vector<int> idx(2);
  for (std::size_t k = 0; k < g.size(); ++k) {
    g.unflat(k, idx);
    CHECK(g.flat(idx) == k);
  }
  const Point p = g.point(g.flat(std::vector<int>{1, 4}));
  CHECK(p[0] == doctest::Approx(-1.5));
  CHECK(p[1] == doctest::Approx(1.5));
}

TEST_CASE("multilinear interpolation reproduces affine functions") {
  const Grid g(2, 2.0, 16);
  const Field f = Field::from_function(g, [](const Point& x) { return 1.0 + 2.0 * x[0] - 0.5 * x[1]; });
  for (double a : {-1.3, 0.0, 0.77})
    for (double b : {-1.7, 0.31, 1.5}) {
      const std::vector<double> x{a, b};
      CHECK(f.interpolate(x) == doctest::Approx(1.0 + 2.0 * a - 0.5 * b).epsilon(1e-12));
    }
}

TEST_CASE("stencil weights form a partition of unity") {
  const Grid g(3, 1.0, 8);
  std::size_t idx[8];
  double w[8];
  for (double s : {-2.0, -0.4, 0.1, 0.93}) {
    const std::vector<double> x{s, -s / 2, s / 3};
    const int m = g.stencil(x, idx, w);
    CHECK(m == 8);
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      CHECK(w[i] >= 0.0);
      total += w[i];
    }
    CHECK(total == doctest::Approx(1.0));
  }
}

TEST_CASE("field norms and inner products") {
  const Grid g(1, 4.0, 400);
  const Field one(g, 1.0);
  CHECK(one.integral() == doctest::Approx(8.0));
  CHECK(one.l2_norm() == doctest::Approx(std::sqrt(8.0)));
  const Field f = Field::from_function(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  CHECK(f.l2_norm() == doctest::Approx(std::sqrt(std::sqrt(std::numbers::pi / 2.0))).epsilon(1e-6));
  CHECK(f.normalized().l2_norm() == doctest::Approx(1.0));
  CHECK(f.lp_norm(4.0) == doctest::Approx(std::pow(std::sqrt(std::numbers::pi / 4.0), 0.25)).epsilon(1e-6));
}

TEST_CASE("centering moves the barycentre to the origin") {
  const Grid g(1, 10.0, 512);
  const Field f = Field::from_function(g, [](const Point& x) { return std::exp(-(x[0] - 1.3) * (x[0] - 1.3)); });
  CHECK(f.barycenter()[0] == doctest::Approx(1.3).epsilon(1e-6));
  CHECK(std::abs(f.centered().barycenter()[0]) < 1e-3);
}

TEST_CASE("real fft round trip") {
  RealFft fft({8, 6});
  auto re = fft.real();
  for (std::size_t i = 0; i < re.size(); ++i) re[i] = std::sin(0.3 * i) + 0.1 * i;
  const std::vector<double> orig(re.begin(), re.end());
  fft.forward();
  CHECK(fft.spectrum()[0].real() == doctest::Approx(std::accumulate(orig.begin(), orig.end(), 0.0)));
  fft.backward();
  for (std::size_t i = 0; i < re.size(); ++i) CHECK(fft.real()[i] == doctest::Approx(orig[i]).epsilon(1e-12));
}

TEST_CASE("sine solver inverts I - a Lap") {
  for (int d : {1, 2}) {
    const Grid g(d, 1.5, 24);
    CounterRng rng(3, d);
    std::vector<double> b(g.size()), x, lap(g.size());
    for (double& v : b) v = rng.normal();
    x = b;
    DirichletSine sine(g);
    sine.solve_shifted(x, 0.37);
    apply_laplacian(g, x, lap);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(x[i] - 0.37 * lap[i] == doctest::Approx(b[i]).epsilon(1e-10));
  }
}

TEST_CASE("dirichlet form equals minus kappa <f, Lap f>") {
  const Grid g(2, 2.0, 20);
  const Field f = Field::from_function(g, [](const Point& x) { return std::cos(x[0]) * (1.0 + x[1] * x[1]); });
  const double form = dirichlet_form(f, 0.7);
  CHECK(form == doctest::Approx(-0.7 * f.dot(laplacian(f))).epsilon(1e-12));
  CHECK(form > 0.0);
}

TEST_CASE("lowest Dirichlet mode of the discrete Laplacian") {
  const Grid g(1, std::numbers::pi / 2.0, 200);
  DirichletSine sine(g);
  const double h = g.spacing();
  CHECK(sine.laplacian_eigenvalue(0) == doctest::Approx(-1.0).epsilon(h * h));
}

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter rng streams are reproducible and distinct") {
  CounterRng a(42, 7), b(42, 7), c(42, 8);
  bool differ = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a(), y = b(), z = c();
    CHECK(x == y);
    differ = differ || x != z;
  }
  CHECK(differ);
}

TEST_CASE("normal draws have unit variance") {
  CounterRng rng(1, 0);
  const int n = 200000;
  double s = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s / n) < 5.0 / std::sqrt(n));
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.05));
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK((u > 0.0 && u < 1.0));
  }
}
