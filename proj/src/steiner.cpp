#include <algorithm>
#include <functional>
#include <numeric>

#include "pamlab/errors.hpp"
#include "pamlab/variational.hpp"

namespace pamlab {

Field steiner_symmetrize(const Field& f, int axis) {
  const Grid& g = f.grid();
  if (axis < 0 || axis >= g.dim) throw InvalidArgument("axis out of range");
  for (double v : f.values())
    if (v < 0.0) throw NegativeInput("steiner symmetrisation needs a nonnegative field");
  const int n = g.n;
  std::size_t stride = 1;
  for (int a = g.dim - 1; a > axis; --a) stride *= n;

  // slots ordered by distance from the box centre, left first on ties
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const double mid = 0.5 * (n - 1);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return std::abs(i - mid) < std::abs(j - mid); });

  Field out(g);
  std::vector<double> slice(n);
  const std::size_t block = stride * n;
  for (std::size_t base = 0; base < f.size(); base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      const std::size_t start = base + off;
      for (int i = 0; i < n; ++i) slice[i] = f[start + i * stride];
      std::sort(slice.begin(), slice.end(), std::greater<>());
      for (int i = 0; i < n; ++i) out[start + order[i] * stride] = slice[i];
    }
  }
  return out;
}

Field f_coord(const Field& f) {
  Field out = f;
  for (int a = 0; a < f.grid().dim; ++a) out = steiner_symmetrize(out, a);
  return out;
}

} // namespace pamlab
