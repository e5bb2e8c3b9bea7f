#include "pamlab/kernels.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_gamma.h>
#include <gsl/gsl_sf_hyperg.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pamlab/errors.hpp"
#include "pamlab/fft.hpp"

namespace pamlab {

namespace {

constexpr double kPi = std::numbers::pi;

struct GslSilencer {
  GslSilencer() { gsl_set_error_handler_off(); }
};
const GslSilencer gsl_silencer;

double unit_sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

double unit_ball_volume(int d) { return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0); }

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

void check_point(const KernelSpec& k, std::span<const double> x) {
  if (static_cast<int>(x.size()) != k.dimension)
    throw InvalidArgument("point dimension " + std::to_string(x.size()) + " does not match kernel dimension " +
                          std::to_string(k.dimension));
}

// e^{-(s^2+u^2)/2} times the surface integral of e^{s u theta_1} over S^{d-1}.
double gaussian_shell(int d, double s, double u) {
  const double z = s * u;
  const double base = std::exp(-0.5 * (s * s + u * u));
  if (z < 1e-12) return base * unit_sphere_area(d);
  const double near = std::exp(-0.5 * (s - u) * (s - u));
  if (d == 1) return near + std::exp(-0.5 * (s + u) * (s + u));
  if (d == 3) {
    if (z < 1e-3) return base * 4.0 * kPi * (1.0 + z * z / 6.0 + z * z * z * z / 120.0);
    return 2.0 * kPi / z * (near - std::exp(-0.5 * (s + u) * (s + u)));
  }
  const double nu = 0.5 * d - 1.0;
  gsl_sf_result r;
  const int status = nu == 0.0 ? gsl_sf_bessel_I0_scaled_e(z, &r) : gsl_sf_bessel_Inu_scaled_e(nu, z, &r);
  if (status) throw QuadratureFailure("bessel evaluation failed at z=" + std::to_string(z));
  return std::pow(2.0 * kPi, 0.5 * d) * std::pow(z, -nu) * r.val * near;
}

struct ShellParams {
  int d;
  double u;
  double power;  // s^{power} weight, applied only on the outer piece
};

double shell_inner(double s, void* p) {
  const auto* sp = static_cast<ShellParams*>(p);
  return gaussian_shell(sp->d, s, sp->u);
}

double shell_outer(double s, void* p) {
  const auto* sp = static_cast<ShellParams*>(p);
  return std::pow(s, sp->power) * gaussian_shell(sp->d, s, sp->u);
}

class Workspace {
public:
  Workspace() : ws_(gsl_integration_workspace_alloc(kLimit)) {}
  ~Workspace() { gsl_integration_workspace_free(ws_); }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
  gsl_integration_workspace* get() { return ws_; }
  static constexpr std::size_t kLimit = 2000;

private:
  gsl_integration_workspace* ws_;
};

// E|u e_1 + Z|^{-omega} for Z standard normal in R^d, by radial quadrature.
double riesz_smoothed_unit(int d, double omega, double u, double rel_tol) {
  ShellParams params{d, u, d - 1.0 - omega};
  Workspace ws;
  gsl_function fn;
  fn.params = &params;

  // inner piece [0, 1]: algebraic weight s^{d-1-omega}
  fn.function = &shell_inner;
  gsl_integration_qaws_table* table = gsl_integration_qaws_table_alloc(params.power, 0.0, 0, 0);
  double inner = 0.0, inner_err = 0.0;
  int status = gsl_integration_qaws(&fn, 0.0, 1.0, table, 0.0, rel_tol, Workspace::kLimit, ws.get(), &inner,
                                    &inner_err);
  gsl_integration_qaws_table_free(table);
  if (status)
    throw QuadratureFailure(std::string("inner radial integral: ") + gsl_strerror(status));

  fn.function = &shell_outer;
  std::vector<double> pts{1.0};
  if (u > 1.0) pts.push_back(u);
  pts.push_back(std::max(u, 1.0) + 40.0);
  double outer = 0.0, outer_err = 0.0;
  status = gsl_integration_qagp(&fn, pts.data(), pts.size(), 0.0, rel_tol, Workspace::kLimit, ws.get(), &outer,
                                &outer_err);
  if (status)
    throw QuadratureFailure(std::string("outer radial integral: ") + gsl_strerror(status));

  const double total = inner + outer;
  if (inner_err + outer_err > rel_tol * std::abs(total) + 1e-300)
    throw QuadratureFailure("radial integral missed tolerance " + std::to_string(rel_tol));
  return std::pow(2.0 * kPi, -0.5 * d) * total;
}

} // namespace

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::White: return "white";
    case KernelFamily::Riesz: return "riesz";
    case KernelFamily::Fractional: return "fractional";
  }
  return "?";
}

KernelFamily kernel_family_from_string(const std::string& s) {
  std::string low(s);
  std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
  if (low == "white") return KernelFamily::White;
  if (low == "riesz") return KernelFamily::Riesz;
  if (low == "fractional") return KernelFamily::Fractional;
  throw InvalidKernel("unknown kernel family '" + s + "'");
}

KernelSpec KernelSpec::white(int dimension, double sigma) {
  KernelSpec k;
  k.family = KernelFamily::White;
  k.dimension = dimension;
  k.sigma = sigma;
  k.validate();
  return k;
}

KernelSpec KernelSpec::riesz(int dimension, double omega, double sigma) {
  KernelSpec k;
  k.family = KernelFamily::Riesz;
  k.dimension = dimension;
  k.omega = omega;
  k.sigma = sigma;
  k.validate();
  return k;
}

KernelSpec KernelSpec::fractional(std::vector<double> omegas, double sigma) {
  KernelSpec k;
  k.family = KernelFamily::Fractional;
  k.dimension = static_cast<int>(omegas.size());
  k.omegas = std::move(omegas);
  k.sigma = sigma;
  k.validate();
  return k;
}

void KernelSpec::validate() const {
  if (dimension < 1) throw InvalidKernel("dimension must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidKernel("sigma must be finite and >= 0");
  switch (family) {
    case KernelFamily::White: break;
    case KernelFamily::Riesz:
      if (!(omega > 0.0 && omega < dimension))
        throw InvalidKernel("riesz exponent must lie in (0, d), got " + std::to_string(omega));
      break;
    case KernelFamily::Fractional:
      if (static_cast<int>(omegas.size()) != dimension)
        throw InvalidKernel("fractional kernel needs one exponent per axis");
      for (double w : omegas)
        if (!(w > 0.0 && w < 1.0)) throw InvalidKernel("fractional exponents must lie in (0, 1)");
      break;
  }
}

double scaling_exponent(const KernelSpec& kernel) {
  kernel.validate();
  switch (kernel.family) {
    case KernelFamily::White: return kernel.dimension;
    case KernelFamily::Riesz: return kernel.omega;
    case KernelFamily::Fractional: {
      double s = 0.0;
      for (double w : kernel.omegas) s += w;
      return s;
    }
  }
  return 0.0;
}

double gamma_value(const KernelSpec& kernel, std::span<const double> x) {
  kernel.validate();
  check_point(kernel, x);
  const double s2 = kernel.sigma * kernel.sigma;
  switch (kernel.family) {
    case KernelFamily::White: throw DistributionalKernel("white kernel is sigma^2 delta_0, no pointwise value");
    case KernelFamily::Riesz: {
      const double r2 = norm2(x);
      if (r2 == 0.0) throw SingularPoint("riesz kernel is singular at the origin");
      return s2 * std::pow(r2, -0.5 * kernel.omega);
    }
    case KernelFamily::Fractional: {
      double v = s2;
      for (int i = 0; i < kernel.dimension; ++i) {
        if (x[i] == 0.0) throw SingularPoint("fractional kernel is singular on coordinate hyperplanes");
        v *= std::pow(std::abs(x[i]), -kernel.omegas[i]);
      }
      return v;
    }
  }
  return 0.0;
}

double riesz_fourier_constant(int d, double omega) {
  return std::pow(kPi, omega - 0.5 * d) * std::tgamma(0.5 * (d - omega)) / std::tgamma(0.5 * omega);
}

double gamma_hat(const KernelSpec& kernel, std::span<const double> xi) {
  kernel.validate();
  check_point(kernel, xi);
  const double s2 = kernel.sigma * kernel.sigma;
  switch (kernel.family) {
    case KernelFamily::White: return s2;
    case KernelFamily::Riesz: {
      const double r2 = norm2(xi);
      if (r2 == 0.0) throw SingularPoint("riesz spectral density is singular at 0");
      const int d = kernel.dimension;
      return s2 * riesz_fourier_constant(d, kernel.omega) * std::pow(r2, -0.5 * (d - kernel.omega));
    }
    case KernelFamily::Fractional: {
      double v = s2;
      for (int i = 0; i < kernel.dimension; ++i) {
        if (xi[i] == 0.0) throw SingularPoint("fractional spectral density is singular on coordinate hyperplanes");
        const double w = kernel.omegas[i];
        v *= riesz_fourier_constant(1, w) * std::pow(std::abs(xi[i]), -(1.0 - w));
      }
      return v;
    }
  }
  return 0.0;
}

double mollifier_hat(double epsilon, std::span<const double> xi) {
  if (epsilon < 0.0) throw InvalidArgument("epsilon must be >= 0");
  if (epsilon == 0.0) return 1.0;
  return std::exp(-2.0 * kPi * kPi * norm2(xi) * epsilon * epsilon);
}

double mollifier(double epsilon, std::span<const double> x) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  const double d = static_cast<double>(x.size());
  return std::pow(2.0 * kPi * epsilon * epsilon, -0.5 * d) * std::exp(-0.5 * norm2(x) / (epsilon * epsilon));
}

double mollified_gamma(const MollifiedKernelSpec& mkernel, std::span<const double> x, double rel_tol) {
  const KernelSpec& k = mkernel.base;
  k.validate();
  check_point(k, x);
  const double eps = mkernel.epsilon;
  if (!(eps > 0.0)) throw InvalidArgument("epsilon must be > 0");
  const double s2 = k.sigma * k.sigma;
  switch (k.family) {
    case KernelFamily::White: return s2 * mollifier(eps, x);
    case KernelFamily::Riesz: {
      const double u = std::sqrt(norm2(x)) / eps;
      return s2 * std::pow(eps, -k.omega) * riesz_smoothed_unit(k.dimension, k.omega, u, rel_tol);
    }
    case KernelFamily::Fractional: {
      double v = s2;
      for (int i = 0; i < k.dimension; ++i) {
        const double w = k.omegas[i];
        v *= std::pow(eps, -w) * riesz_smoothed_unit(1, w, std::abs(x[i]) / eps, rel_tol);
      }
      return v;
    }
  }
  return 0.0;
}

Eigen::MatrixXd hessian_sigma(const KernelSpec& kernel) {
  kernel.validate();
  const int d = kernel.dimension;
  const MollifiedKernelSpec mk{kernel, 1.0};
  auto g = [&](double a, int i, double b, int j) {
    std::vector<double> x(d, 0.0);
    x[i] += a;
    x[j] += b;
    return mollified_gamma(mk, x, 1e-12);
  };
  std::vector<double> zero(d, 0.0);
  const double g0 = mollified_gamma(mk, zero, 1e-12);

  auto second = [&](int i, int j, double h) {
    if (i == j) return (g(h, i, 0.0, i) - 2.0 * g0 + g(-h, i, 0.0, i)) / (h * h);
    return (g(h, i, h, j) - g(h, i, -h, j) - g(-h, i, h, j) + g(-h, i, -h, j)) / (4.0 * h * h);
  };

  constexpr double step = 1e-2;
  Eigen::MatrixXd sigma(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const double coarse = second(i, j, step);
      const double fine = second(i, j, 0.5 * step);
      const double h = (4.0 * fine - coarse) / 3.0;
      sigma(i, j) = -h;
      sigma(j, i) = -h;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  if (es.eigenvalues().minCoeff() < -1e-8 * top) throw NonPSD("estimated -Hess gamma_1(0) is not PSD");
  return sigma;
}

std::vector<double> lattice_spectral_density(const KernelSpec& kernel, double epsilon, int N, double L) {
  kernel.validate();
  if (N < 1 || !(L > 0.0)) throw InvalidArgument("lattice needs N >= 1 and L > 0");
  const int d = kernel.dimension;
  const int last = N / 2 + 1;
  std::size_t total = last;
  for (int a = 0; a + 1 < d; ++a) total *= N;

  const double s2 = kernel.sigma * kernel.sigma;
  // Separable singular densities (Fractional, and Riesz on the line) use the
  // exact spectral mass of each lattice cell along every axis.
  const bool separable = kernel.family == KernelFamily::Fractional ||
                         (kernel.family == KernelFamily::Riesz && d == 1);
  std::vector<std::vector<double>> axis;
  if (separable) {
    axis.resize(d);
    for (int a = 0; a < d; ++a) {
      const double w = kernel.family == KernelFamily::Riesz ? kernel.omega : kernel.omegas[a];
      const double c = riesz_fourier_constant(1, w);
      axis[a].resize(N);
      for (int k = 0; k < N; ++k) {
        const double m = std::abs(static_cast<double>(signed_frequency(k, N)));
        const double one[1] = {m / L};
        const double mass = m == 0.0 ? 2.0 * std::pow(0.5, w) : std::pow(m + 0.5, w) - std::pow(m - 0.5, w);
        axis[a][k] = c / w * std::pow(L, 1.0 - w) * mass * mollifier_hat(epsilon, one);
      }
    }
  }
  double riesz_zero = 0.0;
  if (kernel.family == KernelFamily::Riesz && !separable) {
    const double rho = std::pow(std::pow(L, -d) / unit_ball_volume(d), 1.0 / d);
    const double mass = riesz_fourier_constant(d, kernel.omega) * unit_sphere_area(d) *
                        std::pow(rho, kernel.omega) / kernel.omega;
    riesz_zero = s2 * mass * std::pow(L, d);
  }

  std::vector<double> out(total);
  std::vector<int> idx(d);
  std::vector<double> xi(d);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rem = k;
    idx[d - 1] = static_cast<int>(rem % last);
    rem /= last;
    for (int a = d - 2; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % N);
      rem /= N;
    }
    bool origin = true;
    for (int a = 0; a < d; ++a) {
      xi[a] = signed_frequency(idx[a], N) / L;
      if (idx[a] != 0) origin = false;
    }
    switch (kernel.family) {
      case KernelFamily::White: out[k] = s2 * mollifier_hat(epsilon, xi); break;
      case KernelFamily::Riesz:
        if (!separable) {
          out[k] = origin ? riesz_zero : gamma_hat(kernel, xi) * mollifier_hat(epsilon, xi);
          break;
        }
        [[fallthrough]];
      case KernelFamily::Fractional: {
        double v = s2;
        for (int a = 0; a < d; ++a) v *= axis[a][idx[a]];
        out[k] = v;
        break;
      }
    }
  }
  return out;
}

// ---- KernelEvaluator ------------------------------------------------------

namespace {

constexpr double kTableEnd = 30.0;
constexpr double kTableStep = 0.005;

double kummer_neg(double a, double b, double z) {
  gsl_sf_result r;
  const int status = gsl_sf_hyperg_1F1_e(a, b, -z, &r);
  if (status) throw QuadratureFailure(std::string("1F1 evaluation failed: ") + gsl_strerror(status));
  return r.val;
}

} // namespace

KernelEvaluator::RadialTable KernelEvaluator::build(int d, double omega, double eps) {
  RadialTable t;
  t.a = 0.5 * omega;
  t.b = 0.5 * d;
  t.prefactor = std::pow(eps, -omega) * std::pow(2.0, -0.5 * omega) * std::tgamma(t.b - t.a) / std::tgamma(t.b);
  t.tail_coef = std::tgamma(t.b) / std::tgamma(t.b - t.a);
  t.du = kTableStep;
  const int nodes = static_cast<int>(std::lround(kTableEnd / kTableStep)) + 1;
  t.f.resize(nodes);
  t.df.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double u = i * t.du;
    const double z = 0.5 * u * u;
    t.f[i] = kummer_neg(t.a, t.b, z);
    t.df[i] = -u * (t.a / t.b) * kummer_neg(t.a + 1.0, t.b + 1.0, z);
  }
  return t;
}

double KernelEvaluator::RadialTable::eval(double u) const {
  const double pos = u / du;
  const std::size_t last = f.size() - 1;
  if (pos >= static_cast<double>(last)) {
    const double z = 0.5 * u * u;
    // M(a, b, -z) ~ Gamma(b)/Gamma(b-a) z^{-a} sum_s (a)_s (a-b+1)_s / s! z^{-s}
    double term = 1.0, sum = 1.0;
    for (int s = 0; s < 4; ++s) {
      term *= (a + s) * (a - b + 1.0 + s) / ((s + 1.0) * z);
      sum += term;
    }
    return prefactor * tail_coef * std::pow(z, -a) * sum;
  }
  const std::size_t i = static_cast<std::size_t>(pos);
  const double s = pos - static_cast<double>(i);
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return prefactor * (h00 * f[i] + h10 * du * df[i] + h01 * f[i + 1] + h11 * du * df[i + 1]);
}

KernelEvaluator::KernelEvaluator(const MollifiedKernelSpec& mkernel) : spec_(mkernel) {
  const KernelSpec& k = spec_.base;
  k.validate();
  if (!(spec_.epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  sigma2_ = k.sigma * k.sigma;
  if (k.family == KernelFamily::Riesz) {
    tables_.push_back(build(k.dimension, k.omega, spec_.epsilon));
  } else if (k.family == KernelFamily::Fractional) {
    for (double w : k.omegas) tables_.push_back(build(1, w, spec_.epsilon));
  }
  std::vector<double> zero(k.dimension, 0.0);
  origin_ = (*this)(zero);
}

double KernelEvaluator::operator()(std::span<const double> x) const {
  const KernelSpec& k = spec_.base;
  const double eps = spec_.epsilon;
  switch (k.family) {
    case KernelFamily::White: return sigma2_ * mollifier(eps, x);
    case KernelFamily::Riesz: return sigma2_ * tables_[0].eval(std::sqrt(norm2(x)) / eps);
    case KernelFamily::Fractional: {
      double v = sigma2_;
      for (std::size_t i = 0; i < tables_.size(); ++i) v *= tables_[i].eval(std::abs(x[i]) / eps);
      return v;
    }
  }
  return 0.0;
}

} // namespace pamlab
