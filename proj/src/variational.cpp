#include "pamlab/variational.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "pamlab/errors.hpp"

namespace pamlab {

// ---- Hartree potential ------------------------------------------------------

HartreeOperator::HartreeOperator(const KernelSpec& kernel, double c, const Grid& grid)
    : grid_(grid), c_(c), padded_n_(2 * grid.n), fft_(std::vector<int>(grid.dim, 2 * grid.n)) {
  kernel.validate();
  if (kernel.dimension != grid.dim) throw InvalidArgument("kernel and grid dimensions differ");
  if (c < 0.0) throw InvalidArgument("mollification scale must be >= 0");
  multiplier_ = lattice_spectral_density(kernel, c, padded_n_, 4.0 * grid.radius);
}

void HartreeOperator::potential(std::span<const double> f, std::span<double> W) {
  auto real = fft_.real();
  std::fill(real.begin(), real.end(), 0.0);
  const int n = grid_.n;
  const int d = grid_.dim;
  std::vector<int> idx(d);
  auto padded = [&](std::size_t k) {
    grid_.unflat(k, idx);
    std::size_t t = 0;
    for (int a = 0; a < d; ++a) t = t * padded_n_ + idx[a];
    return t;
  };
  for (std::size_t k = 0; k < f.size(); ++k) real[padded(k)] = f[k] * f[k];
  fft_.forward();
  auto spec = fft_.spectrum();
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= multiplier_[k];
  fft_.backward();
  for (std::size_t k = 0; k < f.size(); ++k) W[k] = real[padded(k)];
  (void)n;
}

Field HartreeOperator::potential(const Field& f) {
  Field W(f.grid());
  potential(f.values(), W.values());
  return W;
}

double HartreeOperator::interaction(std::span<const double> f) {
  std::vector<double> W(f.size());
  potential(f, W);
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * f[k] * W[k];
  return 0.5 * acc * grid_.cell_volume();
}

double dirichlet_energy(const Field& f, double kappa) {
  if (!(f.l2_norm() > 0.0)) throw InvalidArgument("dirichlet_energy needs a nonzero field");
  return dirichlet_form(f, kappa);
}

double interaction(const Field& f, const KernelSpec& kernel, double c, bool singular_quadrature) {
  if (!(f.l2_norm() > 0.0)) throw InvalidArgument("interaction needs a nonzero field");
  if (c == 0.0 && kernel.is_singular_at_origin() && !singular_quadrature)
    throw SingularQuadratureDisabled("c = 0 with a singular kernel needs the lattice quadrature");
  HartreeOperator op(kernel, c, f.grid());
  return op.interaction(f.values());
}

namespace {

struct Moments {
  double mass = 0.0;
  Eigen::VectorXd first;
  Eigen::MatrixXd second;
};

Moments density_moments(const Field& f) {
  const Grid& g = f.grid();
  const int d = g.dim;
  Moments m;
  m.first = Eigen::VectorXd::Zero(d);
  m.second = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd x(d);
  std::vector<int> idx(d);
  for (std::size_t k = 0; k < f.size(); ++k) {
    g.unflat(k, idx);
    for (int a = 0; a < d; ++a) x[a] = g.coord(idx[a]);
    const double w = f[k] * f[k];
    m.mass += w;
    m.first += w * x;
    m.second += w * x * x.transpose();
  }
  const double hv = g.cell_volume();
  m.mass *= hv;
  m.first *= hv;
  m.second *= hv;
  return m;
}

void check_sigma(const Eigen::MatrixXd& sigma, int d) {
  if (sigma.rows() != d || sigma.cols() != d) throw InvalidArgument("Sigma must be d x d");
}

// q(x) with grad Q = q f
std::vector<double> gk_multiplier(const Field& f, const Eigen::MatrixXd& sigma) {
  const Grid& g = f.grid();
  const int d = g.dim;
  const Moments m = density_moments(f);
  const double tr = (sigma * m.second).trace();
  const Eigen::VectorXd s_mu = sigma * m.first;
  std::vector<double> q(f.size());
  Eigen::VectorXd x(d);
  std::vector<int> idx(d);
  for (std::size_t k = 0; k < f.size(); ++k) {
    g.unflat(k, idx);
    for (int a = 0; a < d; ++a) x[a] = g.coord(idx[a]);
    q[k] = tr + m.mass * x.dot(sigma * x) - 2.0 * s_mu.dot(x);
  }
  return q;
}

} // namespace

double gk_interaction(const Field& f, const Eigen::MatrixXd& sigma) {
  check_sigma(sigma, f.grid().dim);
  const Moments m = density_moments(f);
  return 0.5 * (m.mass * (sigma * m.second).trace() - m.first.dot(sigma * m.first));
}

Field gk_interaction_gradient(const Field& f, const Eigen::MatrixXd& sigma) {
  check_sigma(sigma, f.grid().dim);
  const std::vector<double> q = gk_multiplier(f, sigma);
  Field out(f.grid());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = q[k] * f[k];
  return out;
}

// ---- functional specs ---------------------------------------------------------

std::string to_string(FunctionalKind kind) {
  switch (kind) {
    case FunctionalKind::SubM: return "SubM";
    case FunctionalKind::SubMc: return "SubMc";
    case FunctionalKind::CrtM: return "CrtM";
    case FunctionalKind::ChiGK: return "ChiGK";
    case FunctionalKind::ChiR: return "ChiR";
    case FunctionalKind::ChiScaled: return "ChiScaled";
    case FunctionalKind::BestG: return "BestG";
  }
  return "?";
}

FunctionalKind functional_kind_from_string(const std::string& s) {
  for (FunctionalKind k : {FunctionalKind::SubM, FunctionalKind::SubMc, FunctionalKind::CrtM, FunctionalKind::ChiGK,
                           FunctionalKind::ChiR, FunctionalKind::ChiScaled, FunctionalKind::BestG})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown functional kind '" + s + "'");
}

FunctionalSpec FunctionalSpec::sub_m(const KernelSpec& k, double kappa) {
  FunctionalSpec s;
  s.kind = FunctionalKind::SubM;
  s.kernel = k;
  s.kappa = kappa;
  s.validate();
  return s;
}

FunctionalSpec FunctionalSpec::sub_mc(const KernelSpec& k, double kappa, double frak_c, double p) {
  FunctionalSpec s;
  s.kind = FunctionalKind::SubMc;
  s.kernel = k;
  s.kappa = kappa;
  s.frak_c = frak_c;
  s.p = p;
  s.validate();
  return s;
}

FunctionalSpec FunctionalSpec::crt_m(const KernelSpec& k, double kappa, double t, double p) {
  FunctionalSpec s;
  s.kind = FunctionalKind::CrtM;
  s.kernel = k;
  s.kappa = kappa;
  s.t = t;
  s.p = p;
  s.validate();
  return s;
}

FunctionalSpec FunctionalSpec::chi_gk(const KernelSpec& k, double kappa, const Eigen::MatrixXd& sigma) {
  FunctionalSpec s;
  s.kind = FunctionalKind::ChiGK;
  s.kernel = k;
  s.kappa = kappa;
  s.sigma = sigma;
  s.validate();
  return s;
}

FunctionalSpec FunctionalSpec::chi_r(FunctionalSpec base, double R) {
  base.base = base.kind;
  base.kind = FunctionalKind::ChiR;
  base.R = R;
  base.validate();
  return base;
}

FunctionalSpec FunctionalSpec::chi_scaled(FunctionalSpec base, double c) {
  base.base = base.kind;
  base.kind = FunctionalKind::ChiScaled;
  base.c = c;
  base.validate();
  return base;
}

FunctionalSpec FunctionalSpec::best_g(const KernelSpec& k, double kappa) {
  FunctionalSpec s;
  s.kind = FunctionalKind::BestG;
  s.kernel = k;
  s.kappa = kappa;
  s.validate();
  return s;
}

void FunctionalSpec::validate() const {
  kernel.validate();
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  const double w = scaling_exponent(kernel);
  const bool sub = w < 2.0 - 1e-12;
  const bool crt = std::abs(w - 2.0) <= 1e-12;
  auto check = [&](FunctionalKind k) {
    switch (k) {
      case FunctionalKind::SubM:
        if (!sub) throw InvalidArgument("SubM needs omega < 2");
        break;
      case FunctionalKind::SubMc:
        if (!sub) throw InvalidArgument("SubMc needs omega < 2");
        if (!(frak_c > 0.0) || !(p > 0.0)) throw InvalidArgument("SubMc needs c > 0 and p > 0");
        break;
      case FunctionalKind::CrtM:
        if (!crt) throw InvalidArgument("CrtM needs omega = 2");
        if (!(t > 0.0) || !(p > 0.0)) throw InvalidArgument("CrtM needs t > 0 and p > 0");
        break;
      case FunctionalKind::ChiGK:
        if (sigma.size() != 0) check_sigma(sigma, kernel.dimension);
        break;
      case FunctionalKind::BestG:
        if (!crt) throw InvalidArgument("BestG needs omega = 2");
        if (regularizer < 0.0) throw InvalidArgument("regularizer must be >= 0");
        break;
      default: throw InvalidArgument("nested ChiR / ChiScaled bases are not supported");
    }
  };
  if (kind == FunctionalKind::ChiR) {
    if (!(R > 0.0)) throw InvalidArgument("ChiR needs R > 0");
    if (base == FunctionalKind::BestG) throw InvalidArgument("ChiR base must be SubM, SubMc, CrtM or ChiGK");
    check(base);
  } else if (kind == FunctionalKind::ChiScaled) {
    if (!(c > 0.0)) throw InvalidArgument("ChiScaled needs c > 0");
    if (!sub) throw InvalidArgument("ChiScaled needs omega < 2");
    if (base == FunctionalKind::BestG) throw InvalidArgument("ChiScaled base must be SubM, SubMc, CrtM or ChiGK");
    check(base);
  } else {
    check(kind);
  }
}

// ---- objective -------------------------------------------------------------

namespace {

// Internal ascent target F with L^2 gradient 2 P f + 2 lambda Lap f.
class Objective {
public:
  Objective(const FunctionalSpec& spec, const Grid& grid) : spec_(spec), grid_(grid), lap_(grid.size()) {
    spec.validate();
    if (spec.kernel.dimension != grid.dim) throw InvalidArgument("kernel and grid dimensions differ");
    const FunctionalKind k = inner_kind();
    const double omega = scaling_exponent(spec.kernel);
    double scale = 1.0;
    if (spec.kind == FunctionalKind::ChiScaled) scale = spec.c * spec.c;
    switch (k) {
      case FunctionalKind::SubM:
        coef_ = scale;
        hartree_ = std::make_unique<HartreeOperator>(spec.kernel, 0.0, grid);
        break;
      case FunctionalKind::SubMc:
        coef_ = scale;
        hartree_ = std::make_unique<HartreeOperator>(
            spec.kernel, std::pow(spec.p, 1.0 / (2.0 - omega)) * spec.frak_c, grid);
        break;
      case FunctionalKind::CrtM:
        coef_ = scale * spec.p * spec.t;
        hartree_ = std::make_unique<HartreeOperator>(spec.kernel, 1.0, grid);
        break;
      case FunctionalKind::ChiGK:
        coef_ = scale;
        sigma_ = spec.sigma.size() != 0 ? spec.sigma : hessian_sigma(spec.kernel);
        break;
      case FunctionalKind::BestG: {
        const double reg = spec.regularizer > 0.0 ? spec.regularizer : 2.0 * grid.spacing();
        hartree_ = std::make_unique<HartreeOperator>(spec.kernel, reg, grid);
        break;
      }
      default: break;
    }
  }

  FunctionalKind inner_kind() const {
    return (spec_.kind == FunctionalKind::ChiR || spec_.kind == FunctionalKind::ChiScaled) ? spec_.base : spec_.kind;
  }

  /// F(f); when P is non-null also the gradient data.
  double eval(const Field& f, std::vector<double>* P, double* lambda) {
    const double kappa = spec_.kappa;
    const double S = dirichlet_form(f, kappa);
    const FunctionalKind k = inner_kind();
    if (k == FunctionalKind::ChiGK) {
      const double Q = coef_ * gk_interaction(f, sigma_);
      if (P) {
        std::vector<double> q = gk_multiplier(f, sigma_);
        P->resize(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) (*P)[i] = -0.5 * coef_ * q[i];
        *lambda = kappa;
      }
      return -(S + Q);
    }
    W_.resize(f.size());
    hartree_->potential(f.values(), W_);
    double J = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) J += f[i] * f[i] * W_[i];
    J *= 0.5 * grid_.cell_volume();
    if (k == FunctionalKind::BestG) {
      const double D = S / kappa;
      const double F = J / D;
      if (P) {
        P->resize(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) (*P)[i] = W_[i] / D;
        *lambda = F / D;
      }
      return F;
    }
    if (P) {
      P->resize(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) (*P)[i] = coef_ * W_[i];
      *lambda = kappa;
    }
    return coef_ * J - S;
  }

  double report(double F) const {
    switch (spec_.kind) {
      case FunctionalKind::SubM:
      case FunctionalKind::SubMc:
      case FunctionalKind::CrtM: return F;
      case FunctionalKind::BestG: return 2.0 * F;
      case FunctionalKind::ChiGK:
      case FunctionalKind::ChiR:
      case FunctionalKind::ChiScaled: return -F;
    }
    return F;
  }

  void gradient(const Field& f, const std::vector<double>& P, double lambda, Field& g) {
    apply_laplacian(grid_, f.values(), lap_);
    for (std::size_t i = 0; i < f.size(); ++i) g[i] = 2.0 * P[i] * f[i] + 2.0 * lambda * lap_[i];
  }

private:
  const FunctionalSpec& spec_;
  Grid grid_;
  double coef_ = 1.0;
  Eigen::MatrixXd sigma_;
  std::unique_ptr<HartreeOperator> hartree_;
  std::vector<double> W_;
  std::vector<double> lap_;
};

Field preset_field(const Grid& grid, InitPreset preset, double width) {
  return Field::from_function(grid, [&](const Point& x) {
    double r2 = 0.0;
    double v = 1.0;
    for (double xi : x) {
      r2 += xi * xi;
      v /= std::cosh(xi / width);
    }
    return preset == InitPreset::Sech ? v : std::exp(-0.5 * r2 / (width * width));
  });
}

Field normalize_or_throw(Field f) {
  const double n = f.l2_norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("field must be nonzero and finite");
  f *= 1.0 / n;
  return f;
}

// Nodes of `grid` inside Q_R form a centred sub-grid with the same spacing.
Grid restricted_grid(const Grid& grid, double R) {
  int inside = 0;
  for (int i = 0; i < grid.n; ++i)
    if (std::abs(grid.coord(i)) < R) ++inside;
  if (inside < 2) throw InvalidArgument("Q_R holds fewer than two grid nodes per axis");
  return Grid(grid.dim, 0.5 * inside * grid.spacing(), inside);
}

Field restrict_to(const Field& f, const Grid& sub) {
  const Grid& g = f.grid();
  const int off = (g.n - sub.n) / 2;
  std::vector<int> idx(g.dim);
  Field out(sub);
  for (std::size_t k = 0; k < out.size(); ++k) {
    sub.unflat(k, idx);
    for (int& i : idx) i += off;
    out[k] = f[g.flat(idx)];
  }
  return out;
}

Field embed_into(const Field& f, const Grid& parent) {
  const Grid& sub = f.grid();
  const int off = (parent.n - sub.n) / 2;
  std::vector<int> idx(sub.dim);
  Field out(parent);
  for (std::size_t k = 0; k < f.size(); ++k) {
    sub.unflat(k, idx);
    for (int& i : idx) i += off;
    out[parent.flat(idx)] = f[k];
  }
  return out;
}

void tangent_project(Field& v, const Field& f) {
  const double r = v.dot(f);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= r * f[i];
}

// cos(theta) f + sin(theta) dir, dir a unit tangent vector at f
void geodesic(const Field& f, const Field& dir, double theta, Field& out) {
  const double c = std::cos(theta), s = std::sin(theta);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = c * f[i] + s * dir[i];
  out *= 1.0 / out.l2_norm();
}

MaximizerResult ascend(const FunctionalSpec& spec, const Grid& grid, Field f, const SolveOptions& options) {
  Objective obj(spec, grid);
  DirichletSine sine(grid);
  const std::size_t N = grid.size();
  const double min_dirichlet = [&] {
    double e = 0.0;
    for (int a = 0; a < grid.dim; ++a) e += -sine.laplacian_eigenvalue(0) / grid.dim;
    return e;
  }();

  MaximizerResult res;
  std::vector<double> P;
  double lambda = 0.0;
  double F = obj.eval(f, &P, &lambda);
  Field g(grid), gt(grid), pg(grid), dir(grid), prev_gt(grid), prev_pg(grid), unit(grid), trial(grid);
  bool have_prev = false;
  double theta_guess = 1e-2;
  bool converged = false;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    obj.gradient(f, P, lambda, g);
    const double mu = 0.5 * g.dot(f);
    gt = g;
    tangent_project(gt, f);
    res.residual = gt.l2_norm();
    if (options.keep_trace) res.trace.push_back({it, obj.report(F), res.residual, theta_guess});
    if (res.residual <= options.tol) {
      converged = true;
      break;
    }

    if (options.symmetrize_every > 0 && it > 0 && it % options.symmetrize_every == 0) {
      Field sym = f;
      for (double& v : sym.values()) v = std::abs(v);
      sym = f_coord(sym);
      sym = normalize_or_throw(sym);
      const double Fs = obj.eval(sym, nullptr, nullptr);
      if (Fs > F) {
        f = sym;
        F = obj.eval(f, &P, &lambda);
        have_prev = false;
        continue;
      }
    }

    // preconditioner (shift - lambda Lap)^{-1}, shift > 0
    const double shift = std::abs(mu) + lambda * min_dirichlet + 1e-300;
    pg = gt;
    sine.solve_shifted(pg.values(), lambda / shift);
    pg *= 1.0 / shift;
    tangent_project(pg, f);

    double beta = 0.0;
    if (have_prev) {
      double num = 0.0;
      for (std::size_t i = 0; i < N; ++i) num += (gt[i] - prev_gt[i]) * pg[i];
      const double den = prev_gt.dot(prev_pg);
      beta = den > 0.0 ? std::max(0.0, num * grid.cell_volume() / den) : 0.0;
    }
    if (have_prev && beta > 0.0) {
      tangent_project(dir, f);
      for (std::size_t i = 0; i < N; ++i) dir[i] = pg[i] + beta * dir[i];
    } else {
      dir = pg;
    }
    if (dir.dot(gt) <= 0.0) dir = pg;
    prev_gt = gt;
    prev_pg = pg;
    have_prev = true;

    const double dn = dir.l2_norm();
    if (!(dn > 0.0) || !std::isfinite(dn)) {
      converged = true;
      break;
    }
    unit = dir;
    unit *= 1.0 / dn;
    const double slope = gt.dot(unit);

    // quadratic model along the geodesic, then backtrack
    double theta0 = std::min(theta_guess, 0.5);
    geodesic(f, unit, theta0, trial);
    const double F0 = obj.eval(trial, nullptr, nullptr);
    const double curv = (F0 - F - slope * theta0) / (theta0 * theta0);
    double best_theta = F0 > F ? theta0 : 0.0;
    double best_F = std::max(F0, F);
    if (curv < 0.0) {
      const double th = std::min(-slope / (2.0 * curv), 4.0 * theta0);
      geodesic(f, unit, th, trial);
      const double Fq = obj.eval(trial, nullptr, nullptr);
      if (Fq > best_F) {
        best_F = Fq;
        best_theta = th;
      }
    } else if (F0 > F) {
      for (double th = 2.0 * theta0; th <= 1.0; th *= 2.0) {
        geodesic(f, unit, th, trial);
        const double Fe = obj.eval(trial, nullptr, nullptr);
        if (!(Fe > best_F)) break;
        best_F = Fe;
        best_theta = th;
      }
    }
    for (double th = 0.5 * theta0; best_theta == 0.0 && th > 1e-18; th *= 0.25) {
      geodesic(f, unit, th, trial);
      const double Fb = obj.eval(trial, nullptr, nullptr);
      if (Fb > F) {
        best_F = Fb;
        best_theta = th;
      }
    }
    if (best_theta == 0.0) {
      if (beta > 0.0) {
        have_prev = false;  // retry along the plain preconditioned gradient
        continue;
      }
      converged = true;  // no ascent left at working precision
      break;
    }
    geodesic(f, unit, best_theta, trial);
    std::swap(f, trial);
    F = obj.eval(f, &P, &lambda);
    theta_guess = best_theta;
  }
  if (!converged) {
    throw NoConvergence(to_string(spec.kind) + ": residual " + std::to_string(res.residual) + " after " +
                        std::to_string(options.max_iter) + " iterations");
  }
  // only f^2 and |grad f| enter, and |grad |f|| <= |grad f|
  for (double& v : f.values()) v = std::abs(v);
  res.iterations = it;
  res.value = obj.report(obj.eval(f, nullptr, nullptr));
  res.maximizer = std::move(f);
  return res;
}

Field initial_field(const FunctionalSpec& spec, const Grid& grid, const Init& init) {
  if (const Field* given = std::get_if<Field>(&init)) {
    if (!(given->grid() == grid)) throw InvalidArgument("initial field lives on a different grid");
    Field f = *given;
    for (double& v : f.values()) v = std::abs(v);
    return normalize_or_throw(f);
  }
  const InitSpec& is = std::get<InitSpec>(init);
  if (is.preset != InitPreset::Auto)
    return normalize_or_throw(preset_field(grid, is.preset, is.width > 0.0 ? is.width : grid.radius / 8.0));
  Objective obj(spec, grid);
  Field best_f;
  double best = -std::numeric_limits<double>::infinity();
  for (double frac : {1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2}) {
    for (InitPreset p : {InitPreset::Gaussian, InitPreset::Sech}) {
      Field cand = normalize_or_throw(preset_field(grid, p, frac * grid.radius));
      const double F = obj.eval(cand, nullptr, nullptr);
      if (F > best) {
        best = F;
        best_f = cand;
      }
    }
  }
  return best_f;
}

} // namespace

void write_trace_csv(std::ostream& os, const MaximizerResult& result) {
  os << "iteration,value,residual,step\n";
  os.precision(17);
  for (const TraceRow& r : result.trace)
    os << r.iteration << ',' << r.value << ',' << r.residual << ',' << r.step << '\n';
}

MaximizerResult solve_maximizer(const FunctionalSpec& spec, const Grid& grid, const Init& init,
                                const SolveOptions& options) {
  spec.validate();
  if (grid.n < 32) throw InvalidArgument("solve_maximizer needs at least 32 points per axis");
  if (!(options.step > 0.0) || !(options.tol > 0.0) || options.max_iter < 1)
    throw InvalidArgument("step, tol and max_iter must be positive");

  MaximizerResult res;
  if (spec.kind == FunctionalKind::ChiR) {
    // supp f in Q_R: the Dirichlet problem on the sub-box
    const Grid sub = restricted_grid(grid, spec.R);
    Field start = initial_field(spec, sub, std::holds_alternative<Field>(init)
                                               ? Init{restrict_to(std::get<Field>(init), sub)}
                                               : init);
    res = ascend(spec, sub, std::move(start), options);
    res.maximizer = embed_into(res.maximizer, grid);
  } else {
    res = ascend(spec, grid, initial_field(spec, grid, init), options);
  }
  if (spec.kind == FunctionalKind::SubMc && res.value <= 0.0)
    throw NegativeObjectiveStall("SubMc supremum is not positive on this box (value " + std::to_string(res.value) +
                                 ")");
  return res;
}

double evaluate_functional(const FunctionalSpec& spec, const Field& f) {
  spec.validate();
  if (spec.kind == FunctionalKind::ChiR) {
    const Grid sub = restricted_grid(f.grid(), spec.R);
    Objective obj(spec, sub);
    return obj.report(obj.eval(normalize_or_throw(restrict_to(f, sub)), nullptr, nullptr));
  }
  Objective obj(spec, f.grid());
  return obj.report(obj.eval(normalize_or_throw(f), nullptr, nullptr));
}

double chi_scaled(const FunctionalSpec& base, double c, const Grid& grid, const SolveOptions& options) {
  const FunctionalSpec spec = FunctionalSpec::chi_scaled(base, c);
  return solve_maximizer(spec, grid, InitSpec{}, options).value;
}

double tail_exponent(double theta, double omega, double M) {
  if (!(theta > 0.0) || !(M > 0.0) || !(omega > 0.0 && omega < 2.0))
    throw InvalidArgument("tail_exponent needs theta, M > 0 and omega in (0, 2)");
  const double a = 4.0 - omega;
  const double b = 2.0 - omega;
  return -2.0 * std::pow(theta, a / 2.0) * std::pow(a, -a / 2.0) * std::pow(M / b, -b / 2.0);
}

double tail_exponent_numeric(double theta, double omega, double M) {
  if (!(theta > 0.0) || !(M > 0.0) || !(omega > 0.0 && omega < 2.0))
    throw InvalidArgument("tail_exponent needs theta, M > 0 and omega in (0, 2)");
  const double q = (4.0 - omega) / (2.0 - omega);
  auto neg = [&](double p) { return -(theta * p - std::pow(p, q) * M); };
  // beyond p_hi the power term dominates and the objective is negative
  const double p_hi = 2.0 * std::pow(theta / M, 1.0 / (q - 1.0));
  const auto r = boost::math::tools::brent_find_minima(neg, 0.0, p_hi, std::numeric_limits<double>::digits);
  return r.second;
}

double crt_threshold(const KernelSpec& kernel, double kappa, double t, const Grid& grid,
                     const SolveOptions& options) {
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");
  const double G = solve_maximizer(FunctionalSpec::best_g(kernel, kappa), grid, InitSpec{}, options).value;
  return 2.0 * kappa / (t * G);
}

} // namespace pamlab
