#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pamlab/errors.hpp"
#include "pamlab/kernels.hpp"
#include "pamlab/rng.hpp"
#include "pamlab/variational.hpp"

using namespace pamlab;

namespace {

Field sech_profile(const Grid& grid) {
  return Field::from_function(grid, [](const Point& x) { return 1.0 / (2.0 * std::sqrt(2.0)) / std::cosh(x[0] / 4.0); });
}

Field bump(const Grid& grid, double width, double shift = 0.0) {
  return Field::from_function(grid, [&](const Point& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - shift * (i + 1)) * (x[i] - shift * (i + 1));
    return std::exp(-s / (2.0 * width * width));
  });
}

Field random_bumps(const Grid& grid, CounterRng& rng) {
  const int count = 1 + static_cast<int>(rng.uniform() * 3);
  std::vector<double> centre, width, amp;
  for (int b = 0; b < count; ++b) {
    centre.push_back((rng.uniform() - 0.5) * grid.radius);
    width.push_back(0.3 + 1.5 * rng.uniform());
    amp.push_back(0.2 + rng.uniform());
  }
  return Field::from_function(grid, [&](const Point& x) {
    double s = 0.0;
    for (int b = 0; b < count; ++b) s += amp[b] * std::exp(-0.5 * std::pow((x[0] - centre[b]) / width[b], 2));
    return s;
  }).normalized();
}

} // namespace

TEST_CASE("sech profile evaluates to 1/48") {
  // J_0 = 1/24 and S = 1/48 for f = sech(x/4) / (2 sqrt 2)
  const Grid grid(1, 30.0, 1024);
  const double v = evaluate_functional(FunctionalSpec::sub_m(KernelSpec::white(1), 1.0), sech_profile(grid));
  CHECK(v == doctest::Approx(1.0 / 48.0).epsilon(1e-3));
}

TEST_CASE("white noise maximizer in 1d") {
  const Grid grid(1, 20.0, 256);
  const auto res = solve_maximizer(FunctionalSpec::sub_m(KernelSpec::white(1), 1.0), grid);
  CHECK(res.value == doctest::Approx(1.0 / 48.0).epsilon(2e-2));
  CHECK(res.maximizer.l2_norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(res.maximizer.min() >= -1e-12);
  CHECK(l2_distance(res.maximizer.centered(), sech_profile(grid)) < 0.05);
}

TEST_CASE("M scales like 1/kappa for white noise in 1d") {
  const Grid grid(1, 40.0, 512);
  const KernelSpec k = KernelSpec::white(1);
  const double m1 = solve_maximizer(FunctionalSpec::sub_m(k, 1.0), grid).value;
  const double m2 = solve_maximizer(FunctionalSpec::sub_m(k, 2.0), grid).value;
  CHECK(m2 / m1 == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("mollified functional sits below the unmollified one") {
  const Grid grid(1, 10.0, 256);
  const KernelSpec k = KernelSpec::white(1);
  const Field f = bump(grid, 1.0);
  const double m = evaluate_functional(FunctionalSpec::sub_m(k, 1.0), f);
  double prev = -1e300;
  for (double c : {0.8, 0.4, 0.2, 0.1}) {
    const double v = evaluate_functional(FunctionalSpec::sub_mc(k, 1.0, c, 1.0), f);
    CHECK(v <= m + 1e-12);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("critical functional depends on p t only") {
  const Grid grid(2, 4.0, 32);
  const KernelSpec k = KernelSpec::white(2);
  const Field f = bump(grid, 0.7);
  const double a = evaluate_functional(FunctionalSpec::crt_m(k, 1.0, 1.0, 2.0), f);
  const double b = evaluate_functional(FunctionalSpec::crt_m(k, 1.0, 2.0, 1.0), f);
  CHECK(a == doctest::Approx(b).epsilon(1e-13));
}

TEST_CASE("white Hartree potential is the square") {
  const Grid grid(1, 5.0, 64);
  HartreeOperator op(KernelSpec::white(1), 0.0, grid);
  const Field f = bump(grid, 0.8);
  const Field W = op.potential(f);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(W[i] == doctest::Approx(f[i] * f[i]).epsilon(1e-10));
}

TEST_CASE("mollified white potential keeps mass") {
  const Grid grid(2, 6.0, 48);
  HartreeOperator op(KernelSpec::white(2), 0.3, grid);
  const Field f = bump(grid, 0.6);
  Field sq = f;
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] *= sq[i];
  CHECK(op.potential(f).integral() == doctest::Approx(sq.integral()).epsilon(1e-8));
}

TEST_CASE("unmollified singular interaction needs quadrature") {
  const Grid grid(1, 5.0, 64);
  const Field f = bump(grid, 1.0);
  const KernelSpec k = KernelSpec::riesz(1, 0.5);
  CHECK_THROWS_AS(interaction(f, k, 0.0, false), SingularQuadratureDisabled);
  CHECK(std::isfinite(interaction(f, k, 0.0, true)));
  CHECK_NOTHROW(interaction(f, k, 0.1, false));
}

TEST_CASE("GK functional matches sqrt(kappa Sigma / 2)") {
  const Grid grid(1, 10.0, 256);
  for (double s : {0.25, 1.0}) {
    Eigen::MatrixXd sigma(1, 1);
    sigma(0, 0) = s;
    const auto res = solve_maximizer(FunctionalSpec::chi_gk(KernelSpec::white(1), 1.0, sigma), grid);
    CHECK(res.value == doctest::Approx(std::sqrt(s / 2.0)).epsilon(1e-2));
  }
}

TEST_CASE("GK gradient matches a directional derivative") {
  const Grid grid(2, 4.0, 24);
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.3, 0.3, 0.5;
  const Field f = bump(grid, 0.9, 0.2);
  const Field g = bump(grid, 0.5, -0.4);
  const Field grad = gk_interaction_gradient(f, sigma);
  const double eta = 1e-5;
  const double fd = (gk_interaction(f + eta * g, sigma) - gk_interaction(f - eta * g, sigma)) / (2.0 * eta);
  CHECK(fd == doctest::Approx(grad.dot(g)).epsilon(1e-6));
}

TEST_CASE("localized infimum shrinks as the box grows") {
  const Grid grid(1, 10.0, 256);
  Eigen::MatrixXd sigma(1, 1);
  sigma(0, 0) = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const FunctionalSpec base = FunctionalSpec::chi_gk(KernelSpec::white(1), 1.0, sigma);
  double prev = 1e300;
  for (double R : {1.0, 2.0, 4.0, 8.0}) {
    const double v = solve_maximizer(FunctionalSpec::chi_r(base, R), grid).value;
    CHECK(v <= prev + 1e-6);
    prev = v;
  }
}

TEST_CASE("tail exponent closed form vs Brent") {
  for (double theta : {0.3, 1.0, 5.0})
    for (double omega : {0.5, 1.0, 1.8})
      for (double M : {0.02, 1.0, 3.0}) {
        const double a = tail_exponent(theta, omega, M);
        CHECK(a < 0.0);
        CHECK(tail_exponent_numeric(theta, omega, M) == doctest::Approx(a).epsilon(1e-9));
      }
  // omega = 1: -sup(theta p - p^3 M) = -2 theta^{3/2} / (3 sqrt(3 M))
  CHECK(tail_exponent(1.0, 1.0, 1.0) == doctest::Approx(-2.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-14));
  CHECK_THROWS_AS(tail_exponent(1.0, 2.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(tail_exponent(0.0, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(tail_exponent_numeric(1.0, 1.0, -1.0), InvalidArgument);
}

TEST_CASE("steiner symmetrisation") {
  const Grid grid(2, 3.0, 20);
  Field f = Field::from_function(grid, [](const Point& x) {
    return std::exp(-(x[0] - 0.7) * (x[0] - 0.7) - 2.0 * (x[1] + 1.1) * (x[1] + 1.1)) +
           0.3 * std::exp(-4.0 * (x[0] + 1.5) * (x[0] + 1.5));
  });
  for (int axis = 0; axis < 2; ++axis) {
    const Field s = steiner_symmetrize(f, axis);
    CHECK(s.l2_norm() == doctest::Approx(f.l2_norm()).epsilon(1e-13));
    CHECK(s.lp_norm(4.0) == doctest::Approx(f.lp_norm(4.0)).epsilon(1e-13));
    CHECK(s.max() == f.max());
  }
  const Field once = f_coord(f);
  const Field twice = f_coord(once);
  CHECK(l2_distance(once, twice) < 1e-14);
  // sorted values interleave outward from the centre, left slot first
  const int n = grid.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n / 2; ++j) {
      CHECK(once[i * n + j] >= once[i * n + (n - 1 - j)]);
      if (j > 0) CHECK(once[i * n + (n - 1 - j)] >= once[i * n + j - 1]);
    }
  CHECK(dirichlet_energy(once, 1.0) <= dirichlet_energy(f, 1.0) * (1.0 + 1e-12));
  f[5] = -1e-3;
  CHECK_THROWS_AS(steiner_symmetrize(f, 0), NegativeInput);
  CHECK_THROWS_AS(f_coord(f), NegativeInput);
}

TEST_CASE("functional validation") {
  const KernelSpec white1 = KernelSpec::white(1);
  const KernelSpec white2 = KernelSpec::white(2);
  CHECK_THROWS_AS(FunctionalSpec::sub_m(white2, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(FunctionalSpec::crt_m(white1, 1.0, 1.0, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(FunctionalSpec::best_g(white1, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(FunctionalSpec::sub_m(white1, 0.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(FunctionalSpec::sub_mc(white1, 1.0, 0.0, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(FunctionalSpec::chi_r(FunctionalSpec::sub_m(white1, 1.0), 0.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(FunctionalSpec::chi_scaled(FunctionalSpec::sub_m(white1, 1.0), -1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(FunctionalSpec::chi_scaled(FunctionalSpec::crt_m(white2, 1.0, 1.0, 1.0), 1.0).validate(),
                  InvalidArgument);
  CHECK_NOTHROW(FunctionalSpec::crt_m(white2, 1.0, 1.0, 1.0).validate());
  CHECK_NOTHROW(FunctionalSpec::sub_m(KernelSpec::riesz(3, 1.5), 1.0).validate());
  CHECK(functional_kind_from_string(to_string(FunctionalKind::ChiScaled)) == FunctionalKind::ChiScaled);
  CHECK_THROWS(functional_kind_from_string("nope"));
  const Grid grid(2, 2.0, 8);
  CHECK_THROWS_AS(solve_maximizer(FunctionalSpec::sub_m(white1, 1.0), grid), InvalidArgument);
}

TEST_CASE("iteration cap raises NoConvergence") {
  SolveOptions opts;
  opts.max_iter = 2;
  opts.tol = 1e-14;
  CHECK_THROWS_AS(solve_maximizer(FunctionalSpec::sub_m(KernelSpec::white(1), 1.0), Grid(1, 20.0, 256), InitSpec{}, opts),
                  NoConvergence);
}

TEST_CASE("trace is recorded on request") {
  SolveOptions opts;
  opts.keep_trace = true;
  const auto res = solve_maximizer(FunctionalSpec::sub_m(KernelSpec::white(1), 1.0), Grid(1, 20.0, 128), InitSpec{}, opts);
  REQUIRE(!res.trace.empty());
  CHECK(res.trace.back().value == doctest::Approx(res.value));
  std::ostringstream os;
  write_trace_csv(os, res);
  CHECK(os.str().find("iteration") != std::string::npos);
}

TEST_CASE("sup of the Hartree potential obeys a fitted Chen bound") {
  // sup (gamma * f^2) <= C |f|^{2 - w} |grad f|^w
  const Grid grid(1, 12.0, 512);
  const double omega = 0.5;
  HartreeOperator op(KernelSpec::riesz(1, omega), 0.0, grid);
  CounterRng rng(77, 0);
  std::vector<double> ratio;
  for (int i = 0; i < 100; ++i) {
    const Field f = random_bumps(grid, rng);
    const double grad = std::sqrt(dirichlet_energy(f, 1.0));
    ratio.push_back(op.potential(f).max() / (std::pow(f.l2_norm(), 2.0 - omega) * std::pow(grad, omega)));
  }
  const double C = *std::max_element(ratio.begin(), ratio.begin() + 50);
  CHECK(C > 0.0);
  for (int i = 50; i < 100; ++i) CHECK(ratio[i] <= C);
}

TEST_CASE("fractional maximizer is symmetric decreasing along each axis") {
  const Grid grid(2, 5.0, 32);
  const auto res = solve_maximizer(FunctionalSpec::sub_m(KernelSpec::fractional({0.5, 0.5}), 1.0), grid);
  CHECK(res.maximizer.min() >= -1e-12);
  const Field c = res.maximizer.centered();
  CHECK(l2_distance(f_coord(c), c) <= 0.01 * c.l2_norm());
}
