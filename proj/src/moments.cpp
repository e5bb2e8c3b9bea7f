#include "pamlab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "pamlab/errors.hpp"
#include "pamlab/noise.hpp"
#include "pamlab/parallel.hpp"
#include "pamlab/rng.hpp"

namespace pamlab {

nlohmann::json to_json(const MomentEstimate& e) {
  return {{"p", e.p},
          {"t", e.t},
          {"epsilon", e.epsilon},
          {"value", e.value},
          {"log_value", e.log_value},
          {"stderr_log", e.stderr_log},
          {"n_noise", e.n_noise},
          {"n_paths", e.n_paths}};
}

namespace {

// log of the mean of exp(L_i), stable for large L
double log_mean_exp(const std::vector<double>& L) {
  double M = -std::numeric_limits<double>::infinity();
  for (double v : L) M = std::max(M, v);
  double s = 0.0;
  for (double v : L) s += std::exp(v - M);
  return M + std::log(s / L.size());
}

struct LogStats {
  double log_mean;
  double stderr_log;
};

LogStats jackknife_log_mean(const std::vector<double>& L) {
  const std::size_t n = L.size();
  LogStats out{log_mean_exp(L), 0.0};
  if (n < 2) return out;
  // leave-one-out sums, computed around the common maximum
  double M = -std::numeric_limits<double>::infinity();
  for (double v : L) M = std::max(M, v);
  std::vector<double> y(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = std::exp(L[i] - M);
    total += y[i];
  }
  std::vector<double> theta(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rest = std::max(total - y[i], std::numeric_limits<double>::min());
    theta[i] = M + std::log(rest / (n - 1));
    mean += theta[i];
  }
  mean /= n;
  double ss = 0.0;
  for (double th : theta) ss += (th - mean) * (th - mean);
  out.stderr_log = std::sqrt((n - 1.0) / n * ss);
  return out;
}

} // namespace

std::vector<double> solution_samples(const MollifiedKernelSpec& mkernel, double t, const Point& x, int n_noise,
                                     const MomentSetup& setup) {
  if (n_noise < 1) throw InvalidArgument("need at least one noise draw");
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");
  std::vector<double> u(n_noise);
  const int w = std::max(1, std::min(setup.workers, n_noise));
  PamSolveConfig solver = setup.solver;
  if (w > 1) solver.workers = 1;
  const int chunk = (n_noise + w - 1) / w;
  parallel_for(w, w, [&](std::size_t b) {
    NoiseSampler sampler(mkernel, setup.grid);
    const int lo = static_cast<int>(b) * chunk, hi = std::min(n_noise, lo + chunk);
    for (int i = lo; i < hi; ++i) {
      const Field V = sampler.sample(setup.seed, i);
      u[i] = solve_at(V, t, x, solver, setup.seed ^ (static_cast<std::uint64_t>(i) + 1));
    }
  });
  return u;
}

MomentEstimate moment_from_samples(const std::vector<double>& u, double p, double t, double epsilon, int n_paths) {
  if (!(p > 0.0)) throw InvalidArgument("p must be positive");
  std::vector<double> L(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) throw Error("non-positive solution sample " + std::to_string(u[i]));
    L[i] = p * std::log(u[i]);
  }
  const LogStats s = jackknife_log_mean(L);
  MomentEstimate e;
  e.p = p;
  e.t = t;
  e.epsilon = epsilon;
  e.log_value = s.log_mean;
  e.value = std::exp(s.log_mean);
  e.stderr_log = s.stderr_log;
  e.n_noise = static_cast<int>(u.size());
  e.n_paths = n_paths;
  return e;
}

MomentEstimate estimate_moment(const MollifiedKernelSpec& mkernel, double t, double p, const Point& x, int n_noise,
                               const MomentSetup& setup) {
  const auto u = solution_samples(mkernel, t, x, n_noise, setup);
  return moment_from_samples(u, p, t, mkernel.epsilon,
                             setup.solver.method == PamMethod::MC ? setup.solver.n_paths : 0);
}

double replica_exponent(const KernelEvaluator& gamma, const std::vector<BrownianPath>& paths) {
  std::vector<const double*> pts;
  double dt = 0.0;
  int d = 0;
  for (const auto& path : paths) {
    dt = path.dt;
    for (std::size_t a = 0; a < path.steps(); ++a) {
      pts.push_back(path.positions[a].data());
      d = static_cast<int>(path.positions[a].size());
    }
  }
  const std::size_t M = pts.size();
  std::vector<double> diff(d);
  double off = 0.0;
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = i + 1; j < M; ++j) {
      for (int a = 0; a < d; ++a) diff[a] = pts[i][a] - pts[j][a];
      off += gamma(diff);
    }
  const double total = M * gamma.at_origin() + 2.0 * off;
  return 0.5 * total * dt * dt;
}

McEstimate replica_moment(const MollifiedKernelSpec& mkernel, double t, int p, int n_samples, double dt,
                          std::uint64_t seed, double kappa, int workers) {
  if (p < 1) throw InvalidArgument("replica moments need an integer p >= 1");
  if (n_samples < 2) throw InvalidArgument("need at least two samples");
  const KernelEvaluator gamma(mkernel);
  const Point origin(mkernel.base.dimension, 0.0);
  std::vector<double> values(n_samples);
  parallel_for(n_samples, workers, [&](std::size_t s) {
    std::vector<BrownianPath> paths;
    for (int j = 0; j < p; ++j) paths.push_back(brownian_path(origin, t, dt, kappa, seed, s * p + j));
    values[s] = std::exp(replica_exponent(gamma, paths));
  });
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n_samples;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= (n_samples - 1);
  return {mean, std::sqrt(var / n_samples), n_samples, seed};
}

double normalized_log_moment(const MomentEstimate& est, const Regime& regime, double omega, double gamma1_at_0) {
  const ScalingTriple s = scaling_functions(regime, est.epsilon, est.p * est.t, gamma1_at_0, omega);
  return (est.log_value - s.H) / s.beta;
}

ScanResult intermittency_scan(const KernelSpec& kernel, double t, const std::vector<double>& epsilons,
                              const std::vector<double>& ps, const ScanBudget& budget) {
  if (ps.size() < 3) throw InvalidArgument("intermittency scan needs at least three p values");
  if (epsilons.empty()) throw InvalidArgument("no epsilon values");
  for (std::size_t i = 1; i < ps.size(); ++i)
    if (!(ps[i] > ps[i - 1])) throw InvalidArgument("p values must increase");
  for (std::size_t i = 1; i < epsilons.size(); ++i)
    if (!(epsilons[i] < epsilons[i - 1])) throw InvalidArgument("epsilon values must decrease");
  const Point origin(kernel.dimension, 0.0);
  const std::size_t P = ps.size();

  ScanResult out;
  std::vector<double> last_u;
  for (double eps : epsilons) {
    last_u = solution_samples({kernel, eps}, t, origin, budget.n_noise, budget.setup);
    const double A = 1.0 / (eps * eps);
    for (double p : ps) {
      const MomentEstimate e = moment_from_samples(last_u, p, t, eps);
      out.rows.push_back({eps, t, p, e.log_value, e.stderr_log, A, e.log_value / A, e.log_value / (A * p)});
    }
  }

  const std::size_t first = out.rows.size() - P;
  const double A = out.rows[first].A;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < P; ++k) {
    lo = std::min(lo, out.rows[first + k].ell_hat_over_p);
    hi = std::max(hi, out.rows[first + k].ell_hat_over_p);
  }
  if (hi - lo <= 1e-9 * std::max(1.0, std::abs(hi))) {
    out.verdict = "flat";
    return out;
  }
  for (std::size_t k = 0; k + 1 < P; ++k) {
    const ScanRow& a = out.rows[first + k];
    const ScanRow& b = out.rows[first + k + 1];
    const double gap = b.ell_hat_over_p - a.ell_hat_over_p;
    const double se = std::max(a.stderr_log / (A * a.p), b.stderr_log / (A * b.p));
    if (se > std::abs(gap))
      throw InsufficientBudget("standard error " + std::to_string(se) + " exceeds the gap " + std::to_string(gap) +
                               " between p = " + std::to_string(a.p) + " and p = " + std::to_string(b.p));
  }

  // bootstrap over noise draws at the smallest epsilon, common resample across p
  const std::size_t n = last_u.size();
  std::vector<double> logu(n);
  for (std::size_t i = 0; i < n; ++i) logu[i] = std::log(last_u[i]);
  int increasing = 0;
  std::vector<double> L(n);
  for (int b = 0; b < budget.bootstrap; ++b) {
    CounterRng rng(budget.setup.seed ^ 0xb0075ULL, b);
    std::vector<std::size_t> pick(n);
    for (auto& k : pick) k = static_cast<std::size_t>(rng.uniform() * n);
    double prev = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (double p : ps) {
      for (std::size_t i = 0; i < n; ++i) L[i] = p * logu[pick[i]];
      const double v = log_mean_exp(L) / (A * p);
      if (!(v > prev)) ok = false;
      prev = v;
    }
    if (ok) ++increasing;
  }
  out.bootstrap_confidence = budget.bootstrap > 0 ? static_cast<double>(increasing) / budget.bootstrap : 0.0;
  out.verdict = out.bootstrap_confidence >= budget.confidence ? "increasing" : "not-increasing";
  return out;
}

void write_scan_csv(std::ostream& os, const ScanResult& scan) {
  os << "epsilon,t,p,log_moment,stderr,A,ell_hat,ell_hat_over_p\n";
  os.precision(17);
  for (const auto& r : scan.rows)
    os << r.epsilon << ',' << r.t << ',' << r.p << ',' << r.log_moment << ',' << r.stderr_log << ',' << r.A << ','
       << r.ell_hat << ',' << r.ell_hat_over_p << '\n';
}

nlohmann::json scan_summary_json(const ScanResult& scan) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : scan.rows)
    rows.push_back({{"epsilon", r.epsilon},
                    {"t", r.t},
                    {"p", r.p},
                    {"log_moment", r.log_moment},
                    {"stderr", r.stderr_log},
                    {"A", r.A},
                    {"ell_hat", r.ell_hat},
                    {"ell_hat_over_p", r.ell_hat_over_p}});
  return {{"verdict", scan.verdict}, {"bootstrap_confidence", scan.bootstrap_confidence}, {"rows", rows}};
}

} // namespace pamlab
