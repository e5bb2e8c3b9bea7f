#include "pamlab/noise.hpp"

#include <cmath>

#include "pamlab/errors.hpp"
#include "pamlab/rng.hpp"

namespace pamlab {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<int> torus_dims(const Grid& g) {
  if (!is_power_of_two(g.n)) throw InvalidArgument("noise grid resolution must be a power of two");
  return std::vector<int>(g.dim, 2 * g.n);
}

} // namespace

NoiseSampler::NoiseSampler(const MollifiedKernelSpec& mkernel, const Grid& grid)
    : spec_(mkernel), grid_(grid), torus_n_(2 * grid.n), fft_(torus_dims(grid)) {
  spec_.base.validate();
  if (spec_.base.dimension != grid.dim) throw InvalidArgument("kernel and grid dimensions differ");
  if (!(spec_.epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  const double L = 4.0 * grid.radius;
  const std::vector<double> density = lattice_spectral_density(spec_.base, spec_.epsilon, torus_n_, L);
  const double points = std::pow(static_cast<double>(torus_n_), grid.dim);
  const double vol = std::pow(L, grid.dim);
  amplitude_.resize(density.size());
  // sum over the full (hermitian) lattice of S_k / L^d
  const int last = torus_n_ / 2 + 1;
  for (std::size_t k = 0; k < density.size(); ++k) {
    const double s = density[k];
    if (!(s >= 0.0) || !std::isfinite(s)) throw NonPositiveSpectrum("spectral density entry " + std::to_string(s));
    amplitude_[k] = std::sqrt(points * s / vol);
    const int j = static_cast<int>(k % last);
    const bool mirrored = j != 0 && !(torus_n_ % 2 == 0 && j == torus_n_ / 2);
    variance_ += (mirrored ? 2.0 : 1.0) * s / vol;
  }
}

Field NoiseSampler::sample(std::uint64_t seed, std::uint64_t replica) {
  CounterRng rng(seed, replica);
  auto real = fft_.real();
  for (double& v : real) v = rng.normal();
  fft_.forward();
  auto spec = fft_.spectrum();
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= amplitude_[k];
  fft_.backward();

  Field out(grid_);
  const int n = grid_.n;
  const int off = n / 2;
  std::vector<int> idx(grid_.dim);
  for (std::size_t k = 0; k < out.size(); ++k) {
    grid_.unflat(k, idx);
    std::size_t t = 0;
    for (int a = 0; a < grid_.dim; ++a) t = t * torus_n_ + (idx[a] + off);
    out[k] = real[t];
  }
  return out;
}

double NoiseSampler::pointwise_variance() const { return variance_; }

Field sample_noise(const MollifiedKernelSpec& mkernel, const Grid& grid, std::uint64_t seed,
                   std::uint64_t replica) {
  NoiseSampler sampler(mkernel, grid);
  return sampler.sample(seed, replica);
}

RescaledNoiseParams RescaledNoiseParams::from_regime(const Regime& regime, double p, double t, double epsilon,
                                                     double gamma1_at_0, double omega) {
  const ScalingTriple s = scaling_functions(regime, epsilon, p * t, gamma1_at_0, omega);
  RescaledNoiseParams out;
  out.p = p;
  out.t = t;
  out.epsilon = epsilon;
  out.alpha = s.alpha;
  out.H = s.H;
  return out;
}

Field rescale_noise(const Field& sample, const RescaledNoiseParams& params, const Grid& target) {
  const Grid& src = sample.grid();
  if (target.dim != src.dim) throw InvalidArgument("target grid dimension differs from the sample");
  if (!(params.alpha > 0.0) || !(params.p > 0.0) || !(params.t > 0.0))
    throw InvalidArgument("alpha, p, t must be positive");
  if (params.alpha * target.radius > src.radius * (1.0 + 1e-12))
    throw DomainTooSmall("alpha * target radius exceeds the sampled box");
  const double a2 = params.alpha * params.alpha;
  const double shift = params.H / (params.p * params.t);
  Point y(target.dim);
  return Field::from_function(target, [&](const Point& x) {
    for (int i = 0; i < target.dim; ++i) y[i] = params.alpha * x[i];
    return a2 * (sample.interpolate(y) - shift);
  });
}

Field rescale_noise(const Field& sample, const RescaledNoiseParams& params) {
  const Grid& src = sample.grid();
  return rescale_noise(sample, params, Grid(src.dim, src.radius / params.alpha, src.n));
}

double linear_functional_variance(const MollifiedKernelSpec& mkernel, const DiscreteMeasure& mu) {
  if (mu.points.size() != mu.weights.size()) throw InvalidArgument("measure needs one weight per atom");
  const std::size_t m = mu.points.size();
  std::vector<double> diff(mkernel.base.dimension);
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(mu.weights[i])) throw InvalidArgument("measure weights must be finite");
    for (std::size_t j = i; j < m; ++j) {
      for (int a = 0; a < mkernel.base.dimension; ++a) diff[a] = mu.points[i][a] - mu.points[j][a];
      const double g = mollified_gamma(mkernel, diff);
      acc += (i == j ? 1.0 : 2.0) * mu.weights[i] * mu.weights[j] * g;
    }
  }
  return acc;
}

double mgf_linear_functional(const MollifiedKernelSpec& mkernel, const DiscreteMeasure& mu, double lambda) {
  if (lambda == 0.0) return 1.0;
  return std::exp(0.5 * lambda * lambda * linear_functional_variance(mkernel, mu));
}

} // namespace pamlab
