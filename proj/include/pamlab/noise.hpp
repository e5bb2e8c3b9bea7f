#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "pamlab/field.hpp"
#include "pamlab/fft.hpp"
#include "pamlab/kernels.hpp"
#include "pamlab/scaling.hpp"

namespace pamlab {

/// Spectral (circulant) sampler for the mollified field xi_eps on a grid.
/// Draws live on the torus of twice the box side and are cropped to the box,
/// so wrap-around correlations stay out of the analysis region.
class NoiseSampler {
public:
  /// grid.n must be a power of two. Throws NonPositiveSpectrum if the
  /// discretised spectral density has a negative or non-finite entry.
  NoiseSampler(const MollifiedKernelSpec& mkernel, const Grid& grid);

  const Grid& grid() const { return grid_; }
  const MollifiedKernelSpec& spec() const { return spec_; }

  /// Replica `replica` of the stream keyed by `seed`.
  Field sample(std::uint64_t seed, std::uint64_t replica = 0);

  /// Variance of one grid value, exact for the discretised field.
  double pointwise_variance() const;

private:
  MollifiedKernelSpec spec_;
  Grid grid_;
  int torus_n_;
  RealFft fft_;
  std::vector<double> amplitude_;
  double variance_ = 0.0;
};

Field sample_noise(const MollifiedKernelSpec& mkernel, const Grid& grid, std::uint64_t seed,
                   std::uint64_t replica = 0);

struct RescaledNoiseParams {
  double p = 1.0;
  double t = 1.0;
  double epsilon = 1.0;
  double alpha = 1.0;
  double H = 0.0;

  /// alpha = alpha_eps(pt), H = H_eps(pt) from the regime's scaling row.
  static RescaledNoiseParams from_regime(const Regime& regime, double p, double t, double epsilon,
                                         double gamma1_at_0, double omega);
};

/// x -> alpha^2 (xi(alpha x) - H/(pt)) on `target`, multilinear between nodes.
/// Throws DomainTooSmall if alpha * target.radius exceeds the sample's box.
Field rescale_noise(const Field& sample, const RescaledNoiseParams& params, const Grid& target);
/// Target grid with the sample's resolution and radius r / alpha.
Field rescale_noise(const Field& sample, const RescaledNoiseParams& params);

struct DiscreteMeasure {
  std::vector<Point> points;
  std::vector<double> weights;
};

/// <exp(lambda (xi_eps, mu))> = exp(lambda^2/2 sum_ij w_i w_j gamma_eps(x_i - x_j)).
double mgf_linear_functional(const MollifiedKernelSpec& mkernel, const DiscreteMeasure& mu, double lambda);

/// Variance sum_ij w_i w_j gamma_eps(x_i - x_j) of (xi_eps, mu).
double linear_functional_variance(const MollifiedKernelSpec& mkernel, const DiscreteMeasure& mu);

} // namespace pamlab
