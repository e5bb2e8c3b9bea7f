#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "pamlab/field.hpp"
#include "pamlab/noise.hpp"

namespace pamlab {

/// Top of the Dirichlet spectrum of kappa Lap + V on the box of V's grid.
struct SpectralDecomposition {
  double kappa = 1.0;
  std::vector<double> eigenvalues;  // decreasing
  std::vector<Field> eigenfunctions;  // L^2-orthonormal
};

/// Top-k eigenpairs of the cell-centred finite-difference operator
/// kappa Lap_h + V. Dense solve for small grids (or k = n^d), thick-restart
/// Lanczos otherwise. Throws EigensolveFailure if Lanczos stalls.
SpectralDecomposition dirichlet_eigens(const Field& V, double kappa, int k = 64);

struct SpectralSolution {
  Field u;
  double truncation_bound = 0.0;  // e^{t lambda_k} || 1 - projection of 1 ||
};

/// sum_k e^{t lambda_k} (e_k, 1) e_k. Throws TruncationDominates if the
/// truncation bound exceeds 1% of ||u||.
SpectralSolution spectral_solution(const SpectralDecomposition& dec, double t);

/// (pt lambda_1 of kappa Lap + xi on Q_{R alpha},  H + beta lambda_1 of
/// kappa Lap + Xi on Q_R) with Xi the rescaled noise and beta = pt/alpha^2.
/// Both boxes carry `points` nodes per axis (0: the sample's resolution).
std::pair<double, double> eigen_rescaling_check(const Field& xi_eps, const RescaledNoiseParams& params, double R,
                                                double kappa = 1.0, int points = 0);

void write_eigenvalues_csv(std::ostream& os, const SpectralDecomposition& dec);

} // namespace pamlab
