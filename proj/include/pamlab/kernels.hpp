#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pamlab/field.hpp"

namespace pamlab {

enum class KernelFamily { White, Riesz, Fractional };

std::string to_string(KernelFamily f);
KernelFamily kernel_family_from_string(const std::string& s);

/// Covariance kernel of the singular noise:
///   White       sigma^2 delta_0                      (omega = d)
///   Riesz       sigma^2 |x|^{-omega},  0 < omega < d
///   Fractional  sigma^2 prod_i |x_i|^{-omega_i},  omega_i in (0, 1)
/// sigma = 0 is accepted and describes the zero field.
struct KernelSpec {
  KernelFamily family = KernelFamily::White;
  double sigma = 1.0;
  int dimension = 1;
  double omega = 0.0;          // Riesz only
  std::vector<double> omegas;  // Fractional only

  static KernelSpec white(int dimension, double sigma = 1.0);
  static KernelSpec riesz(int dimension, double omega, double sigma = 1.0);
  static KernelSpec fractional(std::vector<double> omegas, double sigma = 1.0);

  /// Throws InvalidKernel when the parameters leave the admissible range.
  void validate() const;
  bool is_singular_at_origin() const { return family != KernelFamily::White; }
};

/// gamma_eps = gamma * p_eps with the Gaussian kernel p_eps of variance eps^2.
struct MollifiedKernelSpec {
  KernelSpec base;
  double epsilon = 1.0;
};

/// Degree of homogeneity: gamma(c x) = c^{-omega} gamma(x).
double scaling_exponent(const KernelSpec& kernel);

double gamma_value(const KernelSpec& kernel, std::span<const double> x);

/// Fourier constant of |x|^{-omega} in R^d under f^(xi) = \int f e^{-2 pi i x.xi} dx:
/// pi^{omega - d/2} Gamma((d - omega)/2) / Gamma(omega/2).
double riesz_fourier_constant(int d, double omega);

double gamma_hat(const KernelSpec& kernel, std::span<const double> xi);

/// Fourier transform of p_eps, e^{-2 pi^2 |xi|^2 eps^2}; 1 at eps = 0.
double mollifier_hat(double epsilon, std::span<const double> xi);

/// Gaussian density p_eps(x).
double mollifier(double epsilon, std::span<const double> x);

/// gamma_eps(x). White uses the closed form sigma^2 p_eps; Riesz reduces to a
/// radial integral split at r = eps (power-weighted Gauss rule on the inner
/// piece); Fractional factorises into 1-D Riesz integrals.
/// Throws QuadratureFailure when `rel_tol` is not met.
double mollified_gamma(const MollifiedKernelSpec& mkernel, std::span<const double> x,
                       double rel_tol = 1e-8);

/// Sigma = -Hess gamma_1(0), by Richardson-refined central differences of
/// mollified_gamma. Throws NonPSD if the estimate is not positive semidefinite.
Eigen::MatrixXd hessian_sigma(const KernelSpec& kernel);

/// Spectral density gamma^ * p_eps^ on the lattice Z^d / L of an N^d torus of
/// side L, in half-complex (FFTW r2c) layout. Lattice cells touching a
/// singular set of gamma^ carry the cell-averaged mass instead of a point
/// value (for Riesz: the zero cell, approximated by the ball of equal volume;
/// for Fractional: every cell on a coordinate hyperplane, exactly per axis).
std::vector<double> lattice_spectral_density(const KernelSpec& kernel, double epsilon, int N, double L);

/// Fast evaluation of gamma_eps for repeated use (Monte Carlo inner loops).
/// Riesz/Fractional are tabulated from the Kummer-function closed form
///   E|x + eps Z|^{-omega} = eps^{-omega} 2^{-omega/2} Gamma((d-omega)/2)/Gamma(d/2)
///                           1F1(omega/2; d/2; -|x|^2 / (2 eps^2)),
/// an evaluation route independent of the quadrature in mollified_gamma.
class KernelEvaluator {
public:
  explicit KernelEvaluator(const MollifiedKernelSpec& mkernel);

  double operator()(std::span<const double> x) const;
  double at_origin() const { return origin_; }
  const MollifiedKernelSpec& spec() const { return spec_; }

private:
  struct RadialTable {
    double a = 0, b = 0;     // 1F1 parameters
    double prefactor = 0;    // eps^{-omega} 2^{-omega/2} Gamma(b - a)/Gamma(b)
    double du = 0;           // node spacing in u = |x| / eps
    std::vector<double> f, df;
    double tail_coef = 0;    // Gamma(b)/Gamma(b-a) for the large-z asymptote
    double eval(double u) const;
  };
  static RadialTable build(int d, double omega, double eps);

  MollifiedKernelSpec spec_;
  double sigma2_ = 0;
  double origin_ = 0;
  std::vector<RadialTable> tables_;
};

} // namespace pamlab
