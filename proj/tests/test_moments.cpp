#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pamlab/errors.hpp"
#include "pamlab/moments.hpp"
#include "pamlab/noise.hpp"

using namespace pamlab;

namespace {

MomentSetup pde_setup(const Grid& grid, double dt, std::uint64_t seed) {
  MomentSetup s;
  s.grid = grid;
  s.solver.dt = dt;
  s.seed = seed;
  return s;
}

MomentSetup mc_setup(const Grid& grid) {
  MomentSetup s;
  s.grid = grid;
  s.solver.method = PamMethod::MC;
  s.solver.boundary = Boundary::LargeBoxApprox;
  s.solver.n_paths = 20;
  s.solver.dt = 0.05;
  s.seed = 1;
  return s;
}

} // namespace

TEST_CASE("moment at a tiny time is one") {
  const MollifiedKernelSpec mk{KernelSpec::white(1), 0.3};
  const auto est = estimate_moment(mk, 1e-6, 2.0, {0.0}, 20, pde_setup(Grid(1, 2.0, 64), 1e-3, 3));
  CHECK(est.value == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(est.n_noise == 20);
}

TEST_CASE("zero noise gives moment one") {
  const MollifiedKernelSpec mk{KernelSpec::white(2, 0.0), 0.5};
  const auto est = estimate_moment(mk, 1.0, 3.0, {0.0, 0.0}, 10, mc_setup(Grid(2, 2.0, 16)));
  CHECK(est.value == 1.0);
  CHECK(est.log_value == 0.0);
  CHECK(est.stderr_log == 0.0);
  const auto rep = replica_moment(mk, 1.0, 3, 50, 0.05, 2);
  CHECK(rep.estimate == 1.0);
  CHECK(rep.stderr_ == 0.0);
}

TEST_CASE("replica integrand is bounded by the origin value") {
  const MollifiedKernelSpec mk{KernelSpec::riesz(1, 0.5), 0.2};
  const KernelEvaluator gamma(mk);
  const double t = 0.8, dt = 0.02;
  const double bound = t * t * gamma.at_origin() / 2.0;
  for (int s = 0; s < 50; ++s) {
    const std::vector<BrownianPath> one{brownian_path({0.0}, t, dt, 1.0, 8, s)};
    const double e = replica_exponent(gamma, one);
    CHECK(e > 0.0);
    CHECK(e <= bound * (1.0 + 1e-12));
  }
  const auto est = replica_moment(mk, t, 1, 200, dt, 8);
  CHECK(est.estimate <= std::exp(bound));
  CHECK(est.estimate > 1.0);
}

TEST_CASE("noise average of a frozen path equals the replica integrand") {
  for (const KernelSpec& k : {KernelSpec::white(1, 0.7), KernelSpec::white(2)}) {
    const MollifiedKernelSpec mk{k, 0.4};
    const KernelEvaluator gamma(mk);
    const double t = 0.6;
    const Point x0(k.dimension, 0.0);
    const auto path = brownian_path(x0, t, 0.02, 1.0, 12, 3);
    const double mgf = mgf_linear_functional(mk, occupation_measure(path), t);
    const double rep = std::exp(replica_exponent(gamma, {path}));
    CHECK(mgf == doctest::Approx(rep).epsilon(1e-10));
  }
}

TEST_CASE("replica exponent ignores path labels") {
  const MollifiedKernelSpec mk{KernelSpec::riesz(2, 1.0), 0.3};
  const KernelEvaluator gamma(mk);
  std::vector<BrownianPath> paths;
  for (int j = 0; j < 3; ++j) paths.push_back(brownian_path({0.0, 0.0}, 0.5, 0.05, 1.0, 4, j));
  const double a = replica_exponent(gamma, paths);
  const double b = replica_exponent(gamma, {paths[2], paths[0], paths[1]});
  const double c = replica_exponent(gamma, {paths[1], paths[2], paths[0]});
  CHECK(b == doctest::Approx(a).epsilon(1e-13));
  CHECK(c == doctest::Approx(a).epsilon(1e-13));
}

TEST_CASE("replica moment is reproducible across workers") {
  const MollifiedKernelSpec mk{KernelSpec::white(1), 0.5};
  const auto a = replica_moment(mk, 0.5, 2, 300, 0.02, 6, 1.0, 1);
  const auto b = replica_moment(mk, 0.5, 2, 300, 0.02, 6, 1.0, 3);
  CHECK(a.estimate == b.estimate);
  CHECK(a.stderr_ == b.stderr_);
  CHECK_THROWS_AS(replica_moment(mk, 0.5, 0, 10, 0.02, 6), InvalidArgument);
}

TEST_CASE("second moment over noise matches the replica estimator") {
  const MollifiedKernelSpec mk{KernelSpec::white(1, 0.6), 0.5};
  const double t = 0.5;
  const auto est = estimate_moment(mk, t, 2.0, {0.0}, 600, pde_setup(Grid(1, 4.0, 64), 0.01, 14));
  const auto rep = replica_moment(mk, t, 2, 6000, 0.01, 15);
  const double se_e = est.value * est.stderr_log;
  const double se = std::sqrt(se_e * se_e + rep.stderr_ * rep.stderr_);
  CHECK(std::abs(est.value - rep.estimate) <= 3.0 * se);
  CHECK(est.value > 1.0);
}

TEST_CASE("power means grow with p on common samples") {
  const MollifiedKernelSpec mk{KernelSpec::white(1), 0.3};
  MomentSetup setup = pde_setup(Grid(1, 3.0, 64), 0.01, 21);
  const auto u = solution_samples(mk, 0.5, {0.0}, 200, setup);
  REQUIRE(u.size() == 200);
  double prev = -1e300;
  for (double p : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    const auto est = moment_from_samples(u, p, 0.5, 0.3);
    CHECK(est.stderr_log >= 0.0);
    CHECK(est.value == doctest::Approx(std::exp(est.log_value)).epsilon(1e-12));
    const double mean = est.log_value / p;
    CHECK(mean >= prev - 1e-12);
    prev = mean;
  }
  setup.workers = 3;
  CHECK(solution_samples(mk, 0.5, {0.0}, 200, setup) == u);
}

TEST_CASE("jackknife on identical samples") {
  const auto est = moment_from_samples(std::vector<double>(10, 2.0), 2.0, 1.0, 0.5, 7);
  CHECK(est.value == doctest::Approx(4.0));
  CHECK(est.log_value == doctest::Approx(std::log(4.0)));
  CHECK(est.stderr_log == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(est.n_paths == 7);
  const auto j = to_json(est);
  CHECK(j.at("p").get<double>() == 2.0);
  CHECK(j.contains("stderr_log"));
}

TEST_CASE("normalized log moment of the zero field") {
  MomentEstimate est;
  est.p = 2.0;
  est.t = 1.0;
  est.epsilon = 0.1;
  est.value = 1.0;
  est.log_value = 0.0;
  Regime regime;
  regime.tag = RegimeTag::Crt2;
  regime.limit_t = 1.0;
  const double g1 = 1.0 / (4.0 * std::numbers::pi);
  const auto tri = scaling_functions(regime, 0.1, 2.0, g1, 2.0);
  CHECK(normalized_log_moment(est, regime, 2.0, g1) == doctest::Approx(-tri.H / tri.beta).epsilon(1e-14));
}

TEST_CASE("scan with zero noise is flat") {
  ScanBudget b;
  b.setup = mc_setup(Grid(1, 2.0, 32));
  b.n_noise = 5;
  b.bootstrap = 20;
  const auto r = intermittency_scan(KernelSpec::white(1, 0.0), 1.0, {0.5, 0.25}, {1.0, 2.0, 3.0}, b);
  REQUIRE(r.rows.size() == 6);
  for (const auto& row : r.rows) {
    CHECK(row.ell_hat == 0.0);
    CHECK(row.A == doctest::Approx(1.0 / (row.epsilon * row.epsilon)));
  }
  CHECK(r.verdict == "flat");
  std::ostringstream os;
  write_scan_csv(os, r);
  CHECK(os.str().rfind("epsilon,t,p,log_moment,stderr,A,ell_hat,ell_hat_over_p\n", 0) == 0);
  CHECK(scan_summary_json(r).at("verdict") == "flat");
  CHECK_THROWS_AS(intermittency_scan(KernelSpec::white(1, 0.0), 1.0, {0.5}, {1.0, 2.0}, b), InvalidArgument);
}
