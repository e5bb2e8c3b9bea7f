#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pamlab/field.hpp"
#include "pamlab/kernels.hpp"
#include "pamlab/pam.hpp"
#include "pamlab/scaling.hpp"

namespace pamlab {

struct MomentEstimate {
  double p = 1.0;
  double t = 1.0;
  double epsilon = 1.0;
  double value = 1.0;       // <u(t,x)^p>
  double log_value = 0.0;
  double stderr_log = 0.0;  // jackknife over noise draws
  int n_noise = 0;
  int n_paths = 0;
};

nlohmann::json to_json(const MomentEstimate& e);

/// Noise draws are replicas 0..n_noise-1 of `seed` on `grid`; each is solved
/// by `solver` (MC paths use the stream seed ^ (draw + 1)).
struct MomentSetup {
  Grid grid;
  PamSolveConfig solver;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// u(t, x) for every noise draw, in draw order.
std::vector<double> solution_samples(const MollifiedKernelSpec& mkernel, double t, const Point& x, int n_noise,
                                     const MomentSetup& setup);

/// Moment estimate from precomputed solution samples.
MomentEstimate moment_from_samples(const std::vector<double>& u, double p, double t, double epsilon,
                                   int n_paths = 0);

/// <u_eps(t, x)^p> over n_noise independent draws of xi_eps.
MomentEstimate estimate_moment(const MollifiedKernelSpec& mkernel, double t, double p, const Point& x, int n_noise,
                               const MomentSetup& setup);

/// <u^p> = E exp(1/2 sum_{j,k} \iint gamma_eps(W^j_u - W^k_v) du dv) over p
/// independent Brownian motions from the origin with generator kappa Lap;
/// left-point sums at step dt. Sample s uses path streams s p + j of `seed`.
McEstimate replica_moment(const MollifiedKernelSpec& mkernel, double t, int p, int n_samples, double dt,
                          std::uint64_t seed, double kappa = 1.0, int workers = 1);

/// Replica exponent 1/2 sum_{j,k} sum_{a,b} gamma_eps(W^j_a - W^k_b) dt^2 of given paths.
double replica_exponent(const KernelEvaluator& gamma, const std::vector<BrownianPath>& paths);

/// (log <u^p> - H_eps(pt)) / beta_eps(pt).
double normalized_log_moment(const MomentEstimate& est, const Regime& regime, double omega, double gamma1_at_0);

struct ScanBudget {
  MomentSetup setup;
  int n_noise = 1000;
  int bootstrap = 1000;
  double confidence = 0.95;
};

struct ScanRow {
  double epsilon, t, p, log_moment, stderr_log, A, ell_hat, ell_hat_over_p;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::string verdict;           // "increasing", "flat" or "not-increasing"
  double bootstrap_confidence = 0.0;  // share of resamples with strict increase at the smallest epsilon
};

/// ell_p(eps) = log <u_eps(t,0)^p> / eps^{-2} for every (eps, p), with common
/// noise draws across p. Throws InsufficientBudget if, at the smallest eps, a
/// standard error of ell_p/p exceeds the gap to its neighbour.
ScanResult intermittency_scan(const KernelSpec& kernel, double t, const std::vector<double>& epsilons,
                              const std::vector<double>& ps, const ScanBudget& budget);

void write_scan_csv(std::ostream& os, const ScanResult& scan);
nlohmann::json scan_summary_json(const ScanResult& scan);

} // namespace pamlab
