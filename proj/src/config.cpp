#include "pamlab/config.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pamlab/errors.hpp"

namespace pamlab {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + raw + "'");
  }
}

} // namespace

Config Config::parse(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  Config cfg;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      cfg.entries_[name] = trim(node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) cfg.entries_[name + "." + key] = trim(leaf.data());
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool Config::has_section(const std::string& section) const {
  const std::string prefix = section + ".";
  auto it = entries_.lower_bound(prefix);
  return it != entries_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
}

std::string Config::str(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(key + ": missing");
  return it->second;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  return has(key) ? str(key) : fallback;
}

double Config::num(const std::string& key) const { return parse_number(key, str(key)); }

double Config::num(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }

long long Config::integer(const std::string& key) const {
  const double x = num(key);
  if (x != std::floor(x) || std::abs(x) > 9e15) throw ConfigError(key + ": expected an integer, got '" + str(key) + "'");
  return static_cast<long long>(x);
}

long long Config::integer(const std::string& key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = str(key);
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

std::vector<double> Config::list(const std::string& key) const {
  std::string raw = str(key);
  std::replace(raw.begin(), raw.end(), ',', ' ');
  std::istringstream is(raw);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(parse_number(key, tok));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<double> Config::list(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? list(key) : fallback;
}

std::string Config::canonical() const {
  std::string s;
  for (const auto& [k, v] : entries_) s += k + " = " + v + "\n";
  return s;
}

std::string Config::hash() const {
  const std::string text = canonical();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

KernelSpec kernel_from_config(const Config& cfg) {
  if (!cfg.has_section("kernel")) throw ConfigError("kernel: missing section");
  KernelSpec k;
  try {
    k.family = kernel_family_from_string(cfg.str("kernel.family"));
  } catch (const InvalidKernel& e) {
    throw ConfigError(std::string("kernel.family: ") + e.what());
  }
  k.sigma = cfg.num("kernel.sigma", 1.0);
  switch (k.family) {
    case KernelFamily::White:
      k.dimension = static_cast<int>(cfg.integer("kernel.dimension"));
      break;
    case KernelFamily::Riesz:
      k.dimension = static_cast<int>(cfg.integer("kernel.dimension"));
      k.omega = cfg.num("kernel.omega");
      break;
    case KernelFamily::Fractional:
      k.omegas = cfg.list("kernel.omegas");
      k.dimension = static_cast<int>(k.omegas.size());
      if (cfg.has("kernel.dimension") && cfg.integer("kernel.dimension") != k.dimension)
        throw ConfigError("kernel.dimension: does not match the number of kernel.omegas");
      break;
  }
  try {
    k.validate();
  } catch (const InvalidKernel& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }
  return k;
}

MollifiedKernelSpec mollified_kernel_from_config(const Config& cfg) {
  MollifiedKernelSpec mk{kernel_from_config(cfg), cfg.num("kernel.epsilon")};
  if (!(mk.epsilon > 0.0)) throw ConfigError("kernel.epsilon: must be positive");
  return mk;
}

Grid grid_from_config(const Config& cfg, int dim) {
  const double r = cfg.num("grid.radius");
  const long long n = cfg.integer("grid.n");
  if (!(r > 0.0)) throw ConfigError("grid.radius: must be positive");
  if (n < 2 || n > (1 << 20)) throw ConfigError("grid.n: must be in [2, 2^20]");
  return Grid(dim, r, static_cast<int>(n));
}

FunctionalSpec functional_from_config(const Config& cfg, const KernelSpec& kernel) {
  auto kind_of = [&](const std::string& key) {
    try {
      return functional_kind_from_string(cfg.str(key));
    } catch (const InvalidArgument& e) {
      throw ConfigError(key + ": " + e.what());
    }
  };
  const double kappa = cfg.num("variational.kappa", 1.0);
  if (!(kappa > 0.0)) throw ConfigError("variational.kappa: must be positive");
  auto build = [&](FunctionalKind kind) -> FunctionalSpec {
    switch (kind) {
      case FunctionalKind::SubM: return FunctionalSpec::sub_m(kernel, kappa);
      case FunctionalKind::SubMc:
        return FunctionalSpec::sub_mc(kernel, kappa, cfg.num("variational.frak_c"), cfg.num("variational.p", 1.0));
      case FunctionalKind::CrtM:
        return FunctionalSpec::crt_m(kernel, kappa, cfg.num("variational.t"), cfg.num("variational.p", 1.0));
      case FunctionalKind::ChiGK: return FunctionalSpec::chi_gk(kernel, kappa, hessian_sigma(kernel));
      case FunctionalKind::BestG: {
        FunctionalSpec s = FunctionalSpec::best_g(kernel, kappa);
        s.regularizer = cfg.num("variational.regularizer", 0.0);
        return s;
      }
      default: throw ConfigError("variational.base: must be sub-m, sub-mc, crt-m or chi-gk");
    }
  };
  const FunctionalKind kind = kind_of("variational.kind");
  FunctionalSpec spec;
  try {
    if (kind == FunctionalKind::ChiR)
      spec = FunctionalSpec::chi_r(build(kind_of("variational.base")), cfg.num("variational.R"));
    else if (kind == FunctionalKind::ChiScaled)
      spec = FunctionalSpec::chi_scaled(build(kind_of("variational.base")), cfg.num("variational.c"));
    else
      spec = build(kind);
    spec.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("variational: ") + e.what());
  } catch (const InvalidKernel& e) {
    throw ConfigError(std::string("variational: ") + e.what());
  }
  return spec;
}

SolveOptions solve_options_from_config(const Config& cfg) {
  SolveOptions o;
  o.tol = cfg.num("variational.tol", o.tol);
  o.max_iter = static_cast<int>(cfg.integer("variational.max_iter", o.max_iter));
  o.symmetrize_every = static_cast<int>(cfg.integer("variational.symmetrize_every", o.symmetrize_every));
  o.keep_trace = cfg.flag("variational.trace", false);
  if (!(o.tol > 0.0)) throw ConfigError("variational.tol: must be positive");
  if (o.max_iter < 1) throw ConfigError("variational.max_iter: must be >= 1");
  return o;
}

PamSolveConfig solver_from_config(const Config& cfg) {
  PamSolveConfig s;
  try {
    s.method = pam_method_from_string(cfg.str("solver.method", "pde"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("solver.method: ") + e.what());
  }
  try {
    s.boundary = boundary_from_string(cfg.str("solver.boundary", "dirichlet"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("solver.boundary: ") + e.what());
  }
  const std::string scheme = cfg.str("solver.scheme", "crank-nicolson");
  if (scheme == "crank-nicolson")
    s.scheme = TimeScheme::CrankNicolson;
  else if (scheme == "explicit")
    s.scheme = TimeScheme::ExplicitEuler;
  else
    throw ConfigError("solver.scheme: expected crank-nicolson or explicit, got '" + scheme + "'");
  s.dt = cfg.num("solver.dt", s.dt);
  s.kappa = cfg.num("solver.kappa", s.kappa);
  s.n_paths = static_cast<int>(cfg.integer("solver.n_paths", s.n_paths));
  s.spectral_k = static_cast<int>(cfg.integer("solver.k", 0));
  if (!(s.dt > 0.0)) throw ConfigError("solver.dt: must be positive");
  if (!(s.kappa > 0.0)) throw ConfigError("solver.kappa: must be positive");
  if (s.n_paths < 2) throw ConfigError("solver.n_paths: must be >= 2");
  if (s.spectral_k < 0) throw ConfigError("solver.k: must be >= 0");
  return s;
}

Regime regime_from_config(const Config& cfg, double omega) {
  if (cfg.has("regime.tag")) {
    Regime r;
    try {
      r.tag = regime_tag_from_string(cfg.str("regime.tag"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("regime.tag: ") + e.what());
    }
    if (r.tag == RegimeTag::Sub2) r.frak_c = cfg.num("regime.frak_c");
    if (r.tag == RegimeTag::Crt2) r.limit_t = cfg.num("regime.limit_t");
    const bool sub = r.tag == RegimeTag::Sub1 || r.tag == RegimeTag::Sub2 || r.tag == RegimeTag::Sub3;
    const bool crt = r.tag == RegimeTag::Crt1 || r.tag == RegimeTag::Crt2;
    if ((sub && !(omega < 2.0)) || (crt && std::abs(omega - 2.0) > 1e-12) || (r.tag == RegimeTag::Sup && !(omega > 2.0)))
      throw ConfigError("regime.tag: " + to_string(r.tag) + " does not fit omega = " + std::to_string(omega));
    return r;
  }
  const PowerLaw e{cfg.num("regime.e_coef"), cfg.num("regime.e_exp")};
  const PowerLaw t{cfg.num("regime.t_coef"), cfg.num("regime.t_exp")};
  return classify_regime(omega, e, t);
}

} // namespace pamlab
