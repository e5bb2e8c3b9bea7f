#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pamlab/field.hpp"
#include "pamlab/noise.hpp"

namespace pamlab {

enum class PamMethod { PDE, Spectral, MC };
enum class Boundary { DirichletBox, LargeBoxApprox };
enum class TimeScheme { CrankNicolson, ExplicitEuler };

std::string to_string(PamMethod m);
std::string to_string(Boundary b);
PamMethod pam_method_from_string(const std::string& s);
Boundary boundary_from_string(const std::string& s);

struct PamSolveConfig {
  PamMethod method = PamMethod::PDE;
  double dt = 1e-3;
  Boundary boundary = Boundary::DirichletBox;
  int n_paths = 10000;
  double kappa = 1.0;
  TimeScheme scheme = TimeScheme::CrankNicolson;
  int spectral_k = 0;  // 0: full basis
  int workers = 1;
};

/// u(t, .) for du/dt = (kappa Lap + V) u, u(0) = 1. Crank-Nicolson with a
/// short backward-Euler start (or explicit Euler). DirichletBox solves on V's
/// box; LargeBoxApprox solves on a padded box (V continued by its edge
/// values, absorbing far boundary) and restricts back to V's grid.
/// Throws StabilityViolation for an explicit step above h^2 / (2 d kappa).
Field solve_pde(const Field& V, double t, const PamSolveConfig& config);

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  int n_paths = 0;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const McEstimate& e);

/// Box Q_r for path killing.
struct Box {
  double radius = 0.0;
};

/// Mean over paths of exp(sum_j V(W_j) dt) * 1{W stays in the box}, W a
/// Brownian motion with generator kappa Lap from x, V looked up in the grid
/// cell containing W (edge cells outside the box). Path i uses the stream
/// (seed, i); the reduction order does not depend on `workers`.
McEstimate feynman_kac(const Field& V, double t, const Point& x, int n_paths, double dt, std::uint64_t seed,
                       std::optional<Box> box = std::nullopt, double kappa = 1.0, int workers = 1);

/// Brownian motion with generator kappa Lap sampled at times 0, dt, ..., t.
struct BrownianPath {
  double kappa = 1.0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Point> positions;

  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
};

/// Path from x over [0, t] with step count round(t / dt), drawn from stream
/// (seed, index): one standard normal per coordinate per step.
BrownianPath brownian_path(const Point& x, double t, double dt, double kappa, std::uint64_t seed,
                           std::uint64_t index = 0);

/// Occupation measure of the discretised path: atoms W_0 .. W_{m-1}, mass 1/m.
DiscreteMeasure occupation_measure(const BrownianPath& path);
/// Same measure binned into the grid's cells (cell masses, total 1).
Field occupation_measure(const BrownianPath& path, const Grid& grid);

/// Left-point sum sum_j V(W_j) dt with the cell lookup used by feynman_kac.
double path_integral(const Field& V, const BrownianPath& path);

/// First sampled time with W outside the open box Q_r; nullopt if none.
std::optional<double> exit_time(const BrownianPath& path, double r);

/// Whole solution field on V's grid by PDE stepping or spectral expansion
/// (InvalidArgument for MC).
Field solve_field(const Field& V, double t, const PamSolveConfig& config);

/// Solution at a single point by the configured method; MC uses the
/// config's n_paths / dt / workers with the given seed, killing paths at the
/// box edge for DirichletBox and not at all for LargeBoxApprox.
double solve_at(const Field& V, double t, const Point& x, const PamSolveConfig& config, std::uint64_t seed = 0);

} // namespace pamlab
