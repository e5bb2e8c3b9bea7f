#pragma once

#include <iosfwd>
#include <memory>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "pamlab/fft.hpp"
#include "pamlab/field.hpp"
#include "pamlab/kernels.hpp"

namespace pamlab {

/// Discrete Hartree potential W = gamma_c * f^2 on a grid. The convolution
/// runs on the zero-padded lattice (twice the box side per axis, so pair
/// distances never wrap) with multiplier gamma^ p_c^; c = 0 uses the
/// unmollified kernel with the singular cells regularised as in
/// lattice_spectral_density.
class HartreeOperator {
public:
  HartreeOperator(const KernelSpec& kernel, double c, const Grid& grid);

  const Grid& grid() const { return grid_; }
  double scale() const { return c_; }

  /// W(x) = \int gamma_c(x - y) f(y)^2 dy at the grid nodes.
  void potential(std::span<const double> f, std::span<double> W);
  Field potential(const Field& f);

  /// (1/2) \iint f(x)^2 gamma_c(x - y) f(y)^2 dx dy.
  double interaction(std::span<const double> f);

private:
  Grid grid_;
  double c_;
  int padded_n_;
  RealFft fft_;
  std::vector<double> multiplier_;
};

/// kappa \int |grad f|^2 of the zero extension (face differences).
double dirichlet_energy(const Field& f, double kappa);

/// (1/2) \iint f^2 gamma_c f^2. c = 0 with a singular kernel needs
/// `singular_quadrature` (else SingularQuadratureDisabled).
double interaction(const Field& f, const KernelSpec& kernel, double c, bool singular_quadrature = true);

/// (1/4) \iint f(x)^2 (x-y)^T Sigma (x-y) f(y)^2 via first and second moments of f^2.
double gk_interaction(const Field& f, const Eigen::MatrixXd& sigma);
/// L^2 gradient of gk_interaction.
Field gk_interaction_gradient(const Field& f, const Eigen::MatrixXd& sigma);

enum class FunctionalKind { SubM, SubMc, CrtM, ChiGK, ChiR, ChiScaled, BestG };

std::string to_string(FunctionalKind kind);
FunctionalKind functional_kind_from_string(const std::string& s);

/// Which variational constant to compute. Reported values:
///   SubM       M           = sup (J_0 - S)
///   SubMc      M_{c,p}     = sup (J_{p^{1/(2-w)} c} - S)
///   CrtM       M^crt_{t,p} = sup (p t J_1 - S)
///   ChiGK      chi         = inf (S + (1/4) \iint f^2 (x-y)^T Sigma (x-y) f^2)
///   ChiR       chi^p_R     = inf over supp f in Q_R of (S + J^p), J^p from `base`
///   ChiScaled  chi^p(c)    = inf (S + c^2 J^p), J^p from `base`
///   BestG      G           = sup \iint f^2 gamma f^2 / \int |grad f|^2
/// where J_c(f) = (1/2) \iint f^2 gamma_c f^2, S = kappa \int |grad f|^2 and
/// J^p = -J_0, -J_{p^{1/(2-w)} c}, -pt J_1 or the Sigma form for the bases
/// SubM, SubMc, CrtM, ChiGK.
struct FunctionalSpec {
  FunctionalKind kind = FunctionalKind::SubM;
  KernelSpec kernel;
  double kappa = 1.0;
  double p = 1.0;
  double frak_c = 0.0;            // SubMc
  double t = 1.0;                 // CrtM
  Eigen::MatrixXd sigma;          // ChiGK
  double R = 0.0;                 // ChiR
  double c = 1.0;                 // ChiScaled
  FunctionalKind base = FunctionalKind::SubM;  // ChiR, ChiScaled
  double regularizer = 0.0;       // BestG mollification; 0 picks twice the grid spacing

  static FunctionalSpec sub_m(const KernelSpec& k, double kappa);
  static FunctionalSpec sub_mc(const KernelSpec& k, double kappa, double frak_c, double p);
  static FunctionalSpec crt_m(const KernelSpec& k, double kappa, double t, double p);
  static FunctionalSpec chi_gk(const KernelSpec& k, double kappa, const Eigen::MatrixXd& sigma);
  static FunctionalSpec chi_r(FunctionalSpec base, double R);
  static FunctionalSpec chi_scaled(FunctionalSpec base, double c);
  static FunctionalSpec best_g(const KernelSpec& k, double kappa);

  /// Throws InvalidArgument when the kernel's omega does not fit the kind.
  void validate() const;
};

struct TraceRow {
  int iteration;
  double value;
  double residual;
  double step;
};

struct MaximizerResult {
  double value = 0.0;
  Field maximizer;  // unit L^2 norm, positive representative
  int iterations = 0;
  double residual = 0.0;
  std::vector<TraceRow> trace;
};

void write_trace_csv(std::ostream& os, const MaximizerResult& result);

enum class InitPreset { Auto, Gaussian, Sech };

struct InitSpec {
  InitPreset preset = InitPreset::Auto;
  double width = 0.0;  // Gaussian / Sech width; 0 picks r/8
};

using Init = std::variant<InitSpec, Field>;

struct SolveOptions {
  double step = 1.0;
  double tol = 1e-7;
  int max_iter = 20000;
  int symmetrize_every = 50;
  bool keep_trace = false;
};

/// Normalised gradient flow on the unit sphere with a sine-transform
/// implicit Laplacian, backtracking on the step, and periodic attempts at
/// the coordinatewise symmetrisation f_coord of the iterate.
/// Throws NoConvergence after max_iter; NegativeObjectiveStall if a SubMc
/// supremum comes out <= 0 on the box.
MaximizerResult solve_maximizer(const FunctionalSpec& spec, const Grid& grid, const Init& init = InitSpec{},
                                const SolveOptions& options = {});

/// Value of the functional at f in the reporting convention above (f is
/// normalised first; ChiR truncates to Q_R).
double evaluate_functional(const FunctionalSpec& spec, const Field& f);

/// chi^p(c) for a base functional, c > 0.
double chi_scaled(const FunctionalSpec& base, double c, const Grid& grid, const SolveOptions& options = {});

/// -sup_{p>0} (theta p - p^{(4-w)/(2-w)} M), closed form.
double tail_exponent(double theta, double omega, double M);
/// Same quantity by 1-D Brent maximisation over p.
double tail_exponent_numeric(double theta, double omega, double M);

/// 2 kappa / (t G_est), G_est from the BestG solve on `grid`.
double crt_threshold(const KernelSpec& kernel, double kappa, double t, const Grid& grid,
                     const SolveOptions& options = {});

/// Steiner symmetrisation along `axis`: every 1-D slice becomes its
/// symmetric decreasing rearrangement about the box centre.
/// Throws NegativeInput if f has a negative entry.
Field steiner_symmetrize(const Field& f, int axis);
/// Steiner symmetrisation along axes 0, 1, ..., d-1 in turn.
Field f_coord(const Field& f);

} // namespace pamlab
