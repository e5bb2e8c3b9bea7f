#include "pamlab/pam.hpp"

#include <algorithm>
#include <cmath>

#include "pamlab/errors.hpp"
#include "pamlab/fft.hpp"
#include "pamlab/parallel.hpp"
#include "pamlab/rng.hpp"
#include "pamlab/spectral.hpp"

namespace pamlab {

std::string to_string(PamMethod m) {
  switch (m) {
    case PamMethod::PDE: return "pde";
    case PamMethod::Spectral: return "spectral";
    case PamMethod::MC: return "mc";
  }
  return "?";
}

std::string to_string(Boundary b) {
  return b == Boundary::DirichletBox ? "dirichlet" : "large-box";
}

PamMethod pam_method_from_string(const std::string& s) {
  if (s == "pde") return PamMethod::PDE;
  if (s == "spectral") return PamMethod::Spectral;
  if (s == "mc") return PamMethod::MC;
  throw InvalidArgument("unknown solver method '" + s + "'");
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "dirichlet") return Boundary::DirichletBox;
  if (s == "large-box") return Boundary::LargeBoxApprox;
  throw InvalidArgument("unknown boundary '" + s + "'");
}

nlohmann::json to_json(const McEstimate& e) {
  return {{"estimate", e.estimate}, {"stderr", e.stderr_}, {"n_paths", e.n_paths}, {"seed", e.seed}};
}

namespace {

// V continued by edge values onto a box wide enough that Brownian paths from
// the original box rarely reach the far boundary before t.
struct Padded {
  Field V;
  int offset = 0;
};

Padded pad_potential(const Field& V, double t, double kappa) {
  const Grid& g = V.grid();
  const double h = g.spacing();
  const double extra = std::max(3.0 * g.radius, 10.0 * std::sqrt(kappa * t));
  const int offset = static_cast<int>(std::ceil(extra / h));
  const int n = g.n + 2 * offset;
  const Grid big(g.dim, n * h / 2.0, n);
  Field out(big);
  std::vector<int> bi(g.dim), si(g.dim);
  for (std::size_t k = 0; k < out.size(); ++k) {
    big.unflat(k, bi);
    for (int a = 0; a < g.dim; ++a) si[a] = std::clamp(bi[a] - offset, 0, g.n - 1);
    out[k] = V[g.flat(si)];
  }
  return {std::move(out), offset};
}

Field restrict_to(const Field& big, const Grid& g, int offset) {
  Field out(g);
  std::vector<int> bi(g.dim), si(g.dim);
  for (std::size_t k = 0; k < out.size(); ++k) {
    g.unflat(k, si);
    for (int a = 0; a < g.dim; ++a) bi[a] = si[a] + offset;
    out[k] = big[big.grid().flat(bi)];
  }
  return out;
}

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Time stepper for du/dt = (kappa Lap + V) u on V's Dirichlet box.
class Stepper {
public:
  Stepper(const Field& V, double kappa) : V_(V), kappa_(kappa), sine_(V.grid()), N_(V.size()) {
    lap_.resize(N_);
    double s = 0.0;
    for (std::size_t i = 0; i < N_; ++i) s += V_[i];
    mean_v_ = s / N_;
  }

  // x <- (I - a A)^{-1} b by preconditioned CG
  void implicit(std::vector<double>& x, const std::vector<double>& b, double a) {
    const double c0 = 1.0 - a * mean_v_;
    std::vector<double> r(N_), z(N_), p(N_), Ap(N_);
    apply_shifted(x, Ap, a);
    for (std::size_t i = 0; i < N_; ++i) r[i] = b[i] - Ap[i];
    const double bnorm = std::sqrt(dotv(b, b));
    auto precond = [&] {
      for (std::size_t i = 0; i < N_; ++i) z[i] = r[i] / c0;
      sine_.solve_shifted(z, a * kappa_ / c0);
    };
    precond();
    p = z;
    double rz = dotv(r, z);
    for (int it = 0; it < 500; ++it) {
      if (std::sqrt(dotv(r, r)) <= 1e-13 * bnorm) return;
      apply_shifted(p, Ap, a);
      const double alpha = rz / dotv(p, Ap);
      for (std::size_t i = 0; i < N_; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * Ap[i];
      }
      precond();
      const double rz_new = dotv(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < N_; ++i) p[i] = z[i] + beta * p[i];
    }
    throw NoConvergence("implicit time step: conjugate gradients did not converge");
  }

  // out = u + a A u
  void explicit_apply(const std::vector<double>& u, std::vector<double>& out, double a) {
    apply_laplacian(V_.grid(), u, lap_);
    for (std::size_t i = 0; i < N_; ++i) out[i] = u[i] + a * (kappa_ * lap_[i] + V_[i] * u[i]);
  }

private:
  // out = (I - a A) u
  void apply_shifted(const std::vector<double>& u, std::vector<double>& out, double a) {
    apply_laplacian(V_.grid(), u, lap_);
    for (std::size_t i = 0; i < N_; ++i) out[i] = u[i] - a * (kappa_ * lap_[i] + V_[i] * u[i]);
  }

  const Field& V_;
  double kappa_;
  DirichletSine sine_;
  std::size_t N_;
  double mean_v_ = 0.0;
  std::vector<double> lap_;
};

Field step_on_box(const Field& V, double t, const PamSolveConfig& cfg) {
  const Grid& g = V.grid();
  const std::size_t N = V.size();
  int m = std::max(1, static_cast<int>(std::ceil(t / cfg.dt - 1e-9)));
  std::vector<double> u(N, 1.0), next(N);
  Stepper stepper(V, cfg.kappa);

  if (cfg.scheme == TimeScheme::ExplicitEuler) {
    const double h = g.spacing();
    const double limit = h * h / (2.0 * g.dim * cfg.kappa);
    if (t / m > limit * (1.0 + 1e-12))
      throw StabilityViolation("explicit step " + std::to_string(t / m) + " exceeds h^2/(2 d kappa) = " +
                               std::to_string(limit));
    const double dt = t / m;
    for (int s = 0; s < m; ++s) {
      stepper.explicit_apply(u, next, dt);
      u.swap(next);
    }
    return Field(g, std::move(u));
  }

  // keep I - (dt/2) A positive definite
  const double vmax = std::max(0.0, V.max());
  if (vmax > 0.0) m = std::max(m, static_cast<int>(std::ceil(t * vmax)));
  const double dt = t / m;
  const int start = std::min(m, 2);
  for (int s = 0; s < 2 * start; ++s) {
    next = u;
    stepper.implicit(next, u, dt / 2.0);
    u.swap(next);
  }
  std::vector<double> rhs(N);
  for (int s = start; s < m; ++s) {
    stepper.explicit_apply(u, rhs, dt / 2.0);
    next = u;
    stepper.implicit(next, rhs, dt / 2.0);
    u.swap(next);
  }
  return Field(g, std::move(u));
}

Field spectral_on_box(const Field& V, double t, const PamSolveConfig& cfg) {
  const int k = cfg.spectral_k > 0 ? cfg.spectral_k : static_cast<int>(V.size());
  return spectral_solution(dirichlet_eigens(V, cfg.kappa, k), t).u;
}

inline std::size_t cell_of(const Grid& g, const double* x) {
  const double h = g.spacing();
  std::size_t k = 0;
  for (int a = 0; a < g.dim; ++a) {
    const int i = std::clamp(static_cast<int>(std::floor((x[a] + g.radius) / h)), 0, g.n - 1);
    k = k * g.n + i;
  }
  return k;
}

inline bool outside(const double* x, int d, double r) {
  for (int a = 0; a < d; ++a)
    if (!(std::abs(x[a]) < r)) return true;
  return false;
}

int step_count(double t, double dt) {
  if (!(t >= 0.0) || !(dt > 0.0)) throw InvalidArgument("need t >= 0 and dt > 0");
  return std::max(1, static_cast<int>(std::lround(t / dt)));
}

} // namespace

Field solve_pde(const Field& V, double t, const PamSolveConfig& config) {
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");
  if (!(config.dt > 0.0) || !(config.kappa > 0.0)) throw InvalidArgument("dt and kappa must be positive");
  if (config.boundary == Boundary::DirichletBox) return step_on_box(V, t, config);
  const Padded p = pad_potential(V, t, config.kappa);
  return restrict_to(step_on_box(p.V, t, config), V.grid(), p.offset);
}

McEstimate feynman_kac(const Field& V, double t, const Point& x, int n_paths, double dt, std::uint64_t seed,
                       std::optional<Box> box, double kappa, int workers) {
  const Grid& g = V.grid();
  if (static_cast<int>(x.size()) != g.dim) throw InvalidArgument("start point has the wrong dimension");
  if (n_paths < 2) throw InvalidArgument("need at least two paths");
  const int m = step_count(t, dt);
  const double h = t / m;
  const double sd = std::sqrt(2.0 * kappa * h);
  const int d = g.dim;
  std::vector<double> values(n_paths);
  parallel_for(n_paths, workers, [&](std::size_t i) {
    CounterRng rng(seed, i);
    std::vector<double> w(x);
    double sum = 0.0;
    bool killed = false;
    for (int j = 0; j < m; ++j) {
      if (box && outside(w.data(), d, box->radius)) {
        killed = true;
        break;
      }
      sum += V[cell_of(g, w.data())] * h;
      for (int a = 0; a < d; ++a) w[a] += sd * rng.normal();
    }
    if (box && outside(w.data(), d, box->radius)) killed = true;
    values[i] = killed ? 0.0 : std::exp(sum);
  });
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n_paths;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= (n_paths - 1);
  return {mean, std::sqrt(var / n_paths), n_paths, seed};
}

BrownianPath brownian_path(const Point& x, double t, double dt, double kappa, std::uint64_t seed,
                           std::uint64_t index) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  const int m = step_count(t, dt);
  BrownianPath path;
  path.kappa = kappa;
  path.dt = t / m;
  const double sd = std::sqrt(2.0 * kappa * path.dt);
  CounterRng rng(seed, index);
  path.times.resize(m + 1);
  path.positions.resize(m + 1);
  Point w = x;
  for (int j = 0; j <= m; ++j) {
    path.times[j] = j * path.dt;
    path.positions[j] = w;
    if (j < m)
      for (double& c : w) c += sd * rng.normal();
  }
  return path;
}

DiscreteMeasure occupation_measure(const BrownianPath& path) {
  DiscreteMeasure mu;
  const std::size_t m = path.steps();
  if (m == 0) throw InvalidArgument("path has no steps");
  mu.points.assign(path.positions.begin(), path.positions.begin() + m);
  mu.weights.assign(m, 1.0 / m);
  return mu;
}

Field occupation_measure(const BrownianPath& path, const Grid& grid) {
  const std::size_t m = path.steps();
  if (m == 0) throw InvalidArgument("path has no steps");
  Field mass(grid);
  for (std::size_t j = 0; j < m; ++j) mass[cell_of(grid, path.positions[j].data())] += 1.0 / m;
  return mass;
}

double path_integral(const Field& V, const BrownianPath& path) {
  double sum = 0.0;
  for (std::size_t j = 0; j < path.steps(); ++j) sum += V[cell_of(V.grid(), path.positions[j].data())] * path.dt;
  return sum;
}

std::optional<double> exit_time(const BrownianPath& path, double r) {
  for (std::size_t j = 0; j < path.positions.size(); ++j)
    if (outside(path.positions[j].data(), static_cast<int>(path.positions[j].size()), r)) return path.times[j];
  return std::nullopt;
}

Field solve_field(const Field& V, double t, const PamSolveConfig& config) {
  switch (config.method) {
    case PamMethod::PDE: return solve_pde(V, t, config);
    case PamMethod::Spectral: {
      if (config.boundary == Boundary::DirichletBox) return spectral_on_box(V, t, config);
      const Padded p = pad_potential(V, t, config.kappa);
      return restrict_to(spectral_on_box(p.V, t, config), V.grid(), p.offset);
    }
    case PamMethod::MC: break;
  }
  throw InvalidArgument("Monte Carlo gives point values only");
}

double solve_at(const Field& V, double t, const Point& x, const PamSolveConfig& config, std::uint64_t seed) {
  if (config.method != PamMethod::MC) return solve_field(V, t, config).interpolate(x);
  std::optional<Box> box;
  if (config.boundary == Boundary::DirichletBox) box = Box{V.grid().radius};
  return feynman_kac(V, t, x, config.n_paths, config.dt, seed, box, config.kappa, config.workers).estimate;
}

} // namespace pamlab
