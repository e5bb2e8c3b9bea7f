#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pamlab/field.hpp"
#include "pamlab/kernels.hpp"
#include "pamlab/pam.hpp"
#include "pamlab/scaling.hpp"
#include "pamlab/variational.hpp"

namespace pamlab {

/// Sectioned key-value configuration (INI). Keys are addressed as
/// "section.key"; lookups that fail throw ConfigError naming the key.
class Config {
public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  bool has_section(const std::string& section) const;
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }

  std::string str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  double num(const std::string& key) const;
  double num(const std::string& key, double fallback) const;
  long long integer(const std::string& key) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> list(const std::string& key) const;
  std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const;

  /// Sorted "key = value" lines; the hash is the SHA-256 of this text.
  std::string canonical() const;
  std::string hash() const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

private:
  std::map<std::string, std::string> entries_;
};

/// [kernel] family, dimension, sigma, omega | omegas.
KernelSpec kernel_from_config(const Config& cfg);
/// [kernel] epsilon.
MollifiedKernelSpec mollified_kernel_from_config(const Config& cfg);
/// [grid] radius, n.
Grid grid_from_config(const Config& cfg, int dim);
/// [variational] kind, kappa, p, frak_c, t, R, c, base, regularizer.
FunctionalSpec functional_from_config(const Config& cfg, const KernelSpec& kernel);
/// [variational] tol, max_iter, symmetrize_every, trace.
SolveOptions solve_options_from_config(const Config& cfg);
/// [solver] method, dt, boundary, n_paths, kappa, scheme, k.
PamSolveConfig solver_from_config(const Config& cfg);
/// [regime] tag (+ frak_c / limit_t), or sequences e_coef, e_exp, t_coef, t_exp.
Regime regime_from_config(const Config& cfg, double omega);

} // namespace pamlab
