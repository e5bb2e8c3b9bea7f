#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "pamlab/field.hpp"

namespace pamlab {

/// Multi-dimensional real <-> half-complex FFT with owned, reusable buffers.
/// The spectrum is laid out row-major with the last axis truncated to
/// n_last/2 + 1 entries (FFTW convention).
class RealFft {
public:
  explicit RealFft(std::vector<int> dims);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  const std::vector<int>& dims() const;
  std::span<double> real();
  std::span<std::complex<double>> spectrum();

  /// real -> spectrum, unnormalised sum_j x_j e^{-2 pi i k.j / N}.
  void forward();
  /// spectrum -> real including the 1/N factor; clobbers the spectrum.
  void backward();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Signed lattice frequency index of position k on an axis of length n.
inline int signed_frequency(int k, int n) { return k <= n / 2 ? k : k - n; }

/// Diagonalises the cell-centred Dirichlet Laplacian (ghost value -f at the
/// box edge, i.e. f vanishes on the boundary of Q_r) with sine transforms.
class DirichletSine {
public:
  explicit DirichletSine(const Grid& grid);
  ~DirichletSine();
  DirichletSine(const DirichletSine&) = delete;
  DirichletSine& operator=(const DirichletSine&) = delete;

  const Grid& grid() const { return grid_; }

  /// Laplacian eigenvalue of sine mode `k` (flat index in coefficient space).
  double laplacian_eigenvalue(std::size_t k) const { return eig_[k]; }

  /// Solves (I - a * Lap) x = b in place, a >= 0.
  void solve_shifted(std::span<double> b, double a);

private:
  Grid grid_;
  std::vector<double> eig_;
  std::vector<double> work_;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
};

/// Cell-centred 2d+1 point Dirichlet Laplacian.
void apply_laplacian(const Grid& grid, std::span<const double> f, std::span<double> out);
Field laplacian(const Field& f);

/// Dirichlet form kappa * \int |grad f|^2 of the zero extension, evaluated on
/// cell faces; equals -kappa <f, Lap f>.
double dirichlet_form(const Field& f, double kappa);

} // namespace pamlab
