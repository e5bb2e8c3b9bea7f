#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pamlab {

using Point = std::vector<double>;

/// Uniform cell-centred grid over the centred box Q_r = (-r, r)^d with n
/// points per axis. Node i on an axis sits at -r + (i + 1/2) h, h = 2r / n.
struct Grid {
  int dim = 1;
  double radius = 1.0;
  int n = 2;

  Grid() = default;
  Grid(int dim, double radius, int n);

  double spacing() const { return 2.0 * radius / n; }
  double cell_volume() const;
  std::size_t size() const;
  double coord(int i) const { return -radius + (i + 0.5) * spacing(); }

  /// Row-major flattening, axis 0 slowest.
  std::size_t flat(std::span<const int> idx) const;
  void unflat(std::size_t k, std::span<int> idx) const;
  Point point(std::size_t k) const;

  bool contains(std::span<const double> x) const;

  /// Multilinear weights of x over the 2^d surrounding nodes (clamped to
  /// the edge nodes outside the node hull). Fills idx/weight, returns 2^d.
  int stencil(std::span<const double> x, std::size_t* idx, double* weight) const;
  bool operator==(const Grid&) const = default;
};

/// A real function sampled on a Grid (noise draw, potential, test function).
class Field {
public:
  Field() = default;
  explicit Field(const Grid& grid, double fill = 0.0);
  Field(const Grid& grid, std::vector<double> values);

  template <class F>
  static Field from_function(const Grid& grid, F&& fn) {
    Field out(grid);
    for (std::size_t k = 0; k < out.size(); ++k) out.values_[k] = fn(grid.point(k));
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  /// \int f g over the box (Riemann sum with weight h^d).
  double dot(const Field& other) const;
  double l2_norm() const;
  double lp_norm(double p) const;
  double integral() const;
  double max() const;
  double min() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

  /// Returns a copy scaled to unit L^2 norm.
  Field normalized() const;

  /// Multilinear interpolation; outside the node hull the nearest edge value
  /// along each axis is used.
  double interpolate(std::span<const double> x) const;

  /// Barycentre \int x f(x)^2 dx / \int f^2.
  Point barycenter() const;

  /// g(x) = f(x + shift), sampled by interpolation; zero where x + shift
  /// leaves the box.
  Field shifted(std::span<const double> shift) const;

  /// Translation gauge: shift so that the f^2 barycentre sits at the origin.
  Field centered() const;

private:
  Grid grid_;
  std::vector<double> values_;
};

Field operator-(Field a, const Field& b);
Field operator+(Field a, const Field& b);
Field operator*(double s, Field a);

/// L^2 distance between two fields on the same grid.
double l2_distance(const Field& a, const Field& b);

/// Resamples `f` onto `target` by multilinear interpolation.
Field resample(const Field& f, const Grid& target);

} // namespace pamlab
