#include "pamlab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "pamlab/errors.hpp"

namespace pamlab {

namespace {
// the FFTW planner is not reentrant
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace

struct RealFft::Impl {
  std::vector<int> dims;
  std::size_t nreal = 1;
  std::size_t ncomplex = 1;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(spec);
  }
};

RealFft::RealFft(std::vector<int> dims) : impl_(std::make_unique<Impl>()) {
  if (dims.empty()) throw InvalidArgument("fft needs at least one axis");
  impl_->dims = std::move(dims);
  for (std::size_t a = 0; a < impl_->dims.size(); ++a) {
    const int n = impl_->dims[a];
    if (n < 1) throw InvalidArgument("fft axis length must be positive");
    impl_->nreal *= n;
    impl_->ncomplex *= (a + 1 == impl_->dims.size()) ? (n / 2 + 1) : n;
  }
  impl_->real = fftw_alloc_real(impl_->nreal);
  impl_->spec = fftw_alloc_complex(impl_->ncomplex);
  const int rank = static_cast<int>(impl_->dims.size());
  std::lock_guard lock(planner_mutex());
  impl_->fwd = fftw_plan_dft_r2c(rank, impl_->dims.data(), impl_->real, impl_->spec, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft_c2r(rank, impl_->dims.data(), impl_->spec, impl_->real, FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->bwd) throw Error("fftw planning failed");
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

const std::vector<int>& RealFft::dims() const { return impl_->dims; }

std::span<double> RealFft::real() { return {impl_->real, impl_->nreal}; }

std::span<std::complex<double>> RealFft::spectrum() {
  return {reinterpret_cast<std::complex<double>*>(impl_->spec), impl_->ncomplex};
}

void RealFft::forward() { fftw_execute(impl_->fwd); }

void RealFft::backward() {
  fftw_execute(impl_->bwd);
  const double inv = 1.0 / static_cast<double>(impl_->nreal);
  for (std::size_t k = 0; k < impl_->nreal; ++k) impl_->real[k] *= inv;
}

DirichletSine::DirichletSine(const Grid& grid) : grid_(grid), eig_(grid.size()), work_(grid.size()) {
  const int d = grid.dim;
  const int n = grid.n;
  const double h = grid.spacing();
  std::vector<double> axis(n);
  for (int k = 0; k < n; ++k) {
    const double s = std::sin(std::numbers::pi * (k + 1) / (2.0 * n));
    axis[k] = -4.0 / (h * h) * s * s;
  }
  std::vector<int> idx(d);
  for (std::size_t k = 0; k < eig_.size(); ++k) {
    grid.unflat(k, idx);
    double e = 0.0;
    for (int a = 0; a < d; ++a) e += axis[idx[a]];
    eig_[k] = e;
  }
  std::vector<int> dims(d, n);
  std::vector<fftw_r2r_kind> fk(d, FFTW_RODFT10), bk(d, FFTW_RODFT01);
  std::lock_guard lock(planner_mutex());
  forward_ = fftw_plan_r2r(d, dims.data(), work_.data(), work_.data(), fk.data(), FFTW_ESTIMATE);
  backward_ = fftw_plan_r2r(d, dims.data(), work_.data(), work_.data(), bk.data(), FFTW_ESTIMATE);
  if (!forward_ || !backward_) throw Error("fftw r2r planning failed");
}

DirichletSine::~DirichletSine() {
  std::lock_guard lock(planner_mutex());
  if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  if (backward_) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

void DirichletSine::solve_shifted(std::span<double> b, double a) {
  std::copy(b.begin(), b.end(), work_.begin());
  fftw_execute(static_cast<fftw_plan>(forward_));
  const double norm = std::pow(2.0 * grid_.n, grid_.dim);
  for (std::size_t k = 0; k < work_.size(); ++k) work_[k] /= (1.0 - a * eig_[k]) * norm;
  fftw_execute(static_cast<fftw_plan>(backward_));
  std::copy(work_.begin(), work_.end(), b.begin());
}

void apply_laplacian(const Grid& grid, std::span<const double> f, std::span<double> out) {
  const int d = grid.dim;
  const int n = grid.n;
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  const std::size_t total = grid.size();
  std::fill(out.begin(), out.end(), 0.0);
  std::size_t stride = 1;
  for (int a = d - 1; a >= 0; --a) {
    for (std::size_t k = 0; k < total; ++k) {
      const int i = static_cast<int>((k / stride) % n);
      const double c = f[k];
      const double left = i > 0 ? f[k - stride] : -c;
      const double right = i < n - 1 ? f[k + stride] : -c;
      out[k] += (left - 2.0 * c + right) * inv_h2;
    }
    stride *= n;
  }
}

Field laplacian(const Field& f) {
  Field out(f.grid());
  apply_laplacian(f.grid(), f.values(), out.values());
  return out;
}

double dirichlet_form(const Field& f, double kappa) {
  const Grid& g = f.grid();
  const int n = g.n;
  const double h = g.spacing();
  const std::size_t total = g.size();
  const auto v = f.values();
  double acc = 0.0;
  std::size_t stride = 1;
  for (int a = g.dim - 1; a >= 0; --a) {
    for (std::size_t k = 0; k < total; ++k) {
      const int i = static_cast<int>((k / stride) % n);
      if (i < n - 1) {
        const double diff = v[k + stride] - v[k];
        acc += diff * diff;
      }
      // half cell between the edge node and the boundary, where f drops to 0
      if (i == 0) acc += 2.0 * v[k] * v[k];
      if (i == n - 1) acc += 2.0 * v[k] * v[k];
    }
    stride *= n;
  }
  return kappa * acc / (h * h) * g.cell_volume();
}

} // namespace pamlab
