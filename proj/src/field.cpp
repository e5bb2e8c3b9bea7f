#include "pamlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pamlab/errors.hpp"

namespace pamlab {

Grid::Grid(int dim_, double radius_, int n_) : dim(dim_), radius(radius_), n(n_) {
  if (dim < 1) throw InvalidArgument("grid dimension must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("grid radius must be positive");
  if (n < 1) throw InvalidArgument("grid needs at least one point per axis");
}

double Grid::cell_volume() const { return std::pow(spacing(), dim); }

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

std::size_t Grid::flat(std::span<const int> idx) const {
  std::size_t k = 0;
  for (int a = 0; a < dim; ++a) k = k * n + static_cast<std::size_t>(idx[a]);
  return k;
}

void Grid::unflat(std::size_t k, std::span<int> idx) const {
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(k % n);
    k /= n;
  }
}

Point Grid::point(std::size_t k) const {
  Point x(dim);
  for (int a = dim - 1; a >= 0; --a) {
    x[a] = coord(static_cast<int>(k % n));
    k /= n;
  }
  return x;
}

bool Grid::contains(std::span<const double> x) const {
  for (int a = 0; a < dim; ++a)
    if (!(std::abs(x[a]) < radius)) return false;
  return true;
}

Field::Field(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

Field::Field(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw InvalidArgument("field size does not match grid");
}

double Field::dot(const Field& other) const {
  if (!(grid_ == other.grid_)) throw InvalidArgument("fields live on different grids");
  return std::inner_product(values_.begin(), values_.end(), other.values_.begin(), 0.0) *
         grid_.cell_volume();
}

double Field::l2_norm() const { return std::sqrt(dot(*this)); }

double Field::lp_norm(double p) const {
  double s = 0.0;
  for (double v : values_) s += std::pow(std::abs(v), p);
  return std::pow(s * grid_.cell_volume(), 1.0 / p);
}

double Field::integral() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) * grid_.cell_volume();
}

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

Field& Field::operator+=(const Field& other) {
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field Field::normalized() const {
  const double nrm = l2_norm();
  if (!(nrm > 0.0)) throw InvalidArgument("cannot normalise a zero field");
  Field out = *this;
  out *= 1.0 / nrm;
  return out;
}

int Grid::stencil(std::span<const double> x, std::size_t* idx, double* weight) const {
  if (dim > 8) throw InvalidArgument("multilinear stencils support d <= 8");
  const double h = spacing();
  int lo[8];
  double w[8];
  for (int a = 0; a < dim; ++a) {
    const double s = (x[a] + radius) / h - 0.5;
    if (n == 1 || s <= 0.0) {
      lo[a] = 0;
      w[a] = 0.0;
    } else if (s >= n - 1) {
      lo[a] = n - 2;
      w[a] = 1.0;
    } else {
      lo[a] = static_cast<int>(std::floor(s));
      w[a] = s - lo[a];
    }
  }
  const int corners = 1 << dim;
  for (int c = 0; c < corners; ++c) {
    double wt = 1.0;
    std::size_t k = 0;
    for (int a = 0; a < dim; ++a) {
      const int bit = (c >> a) & 1;
      wt *= bit ? w[a] : 1.0 - w[a];
      k = k * n + static_cast<std::size_t>(std::min(lo[a] + bit, n - 1));
    }
    idx[c] = k;
    weight[c] = wt;
  }
  return corners;
}

double Field::interpolate(std::span<const double> x) const {
  std::size_t idx[256];
  double w[256];
  const int m = grid_.stencil(x, idx, w);
  double acc = 0.0;
  for (int c = 0; c < m; ++c)
    if (w[c] != 0.0) acc += w[c] * values_[idx[c]];
  return acc;
}

Point Field::barycenter() const {
  const int d = grid_.dim;
  Point m(d, 0.0);
  double mass = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double w = values_[k] * values_[k];
    const Point x = grid_.point(k);
    for (int a = 0; a < d; ++a) m[a] += w * x[a];
    mass += w;
  }
  if (mass > 0.0)
    for (double& v : m) v /= mass;
  return m;
}

Field Field::shifted(std::span<const double> shift) const {
  Field out(grid_);
  Point y(grid_.dim);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const Point x = grid_.point(k);
    for (int a = 0; a < grid_.dim; ++a) y[a] = x[a] + shift[a];
    out.values_[k] = grid_.contains(y) ? interpolate(y) : 0.0;
  }
  return out;
}

Field Field::centered() const { return shifted(barycenter()); }

Field operator-(Field a, const Field& b) { return a -= b; }
Field operator+(Field a, const Field& b) { return a += b; }
Field operator*(double s, Field a) { return a *= s; }

double l2_distance(const Field& a, const Field& b) { return (a - b).l2_norm(); }

Field resample(const Field& f, const Grid& target) {
  Field out(target);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = f.interpolate(target.point(k));
  return out;
}

} // namespace pamlab
