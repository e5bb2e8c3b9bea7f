#include "pamlab/runner.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pamlab/acceptance.hpp"
#include "pamlab/errors.hpp"
#include "pamlab/field_io.hpp"
#include "pamlab/moments.hpp"
#include "pamlab/noise.hpp"
#include "pamlab/pam.hpp"
#include "pamlab/scaling.hpp"
#include "pamlab/variational.hpp"

namespace pamlab {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Context {
  Config cfg;
  std::string command;
  std::vector<std::uint64_t> seeds;
  fs::path out_dir;
  int workers = 1;
  std::string format;
  std::string hash;
};

ojson stamp(const Context& ctx, const std::string& module) {
  return {{"module", module}, {"version", kVersion}, {"config_hash", ctx.hash}};
}

std::string csv_cell(const ojson& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return v.dump();
}

// Rows share their keys; module/version/hash lead every CSV row.
std::string render(const Context& ctx, const std::string& module, const std::vector<ojson>& rows,
                   const ojson& extra = ojson::object()) {
  if (ctx.format == "json") {
    ojson doc = stamp(ctx, module);
    ojson params = ojson::object();
    for (const auto& [k, v] : ctx.cfg.entries()) params[k] = v;
    doc["parameters"] = params;
    for (auto it = extra.begin(); it != extra.end(); ++it) doc[it.key()] = it.value();
    doc["rows"] = rows;
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "module,version,config_hash";
  if (!rows.empty())
    for (auto it = rows.front().begin(); it != rows.front().end(); ++it) os << ',' << it.key();
  os << '\n';
  for (const auto& row : rows) {
    os << module << ',' << kVersion << ',' << ctx.hash;
    for (auto it = row.begin(); it != row.end(); ++it) os << ',' << csv_cell(it.value());
    os << '\n';
  }
  return os.str();
}

void emit(const Context& ctx, std::ostream& out, const std::string& name, const std::string& text) {
  const fs::path path = ctx.out_dir / (name + "." + ctx.format);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
  out << text;
}

std::string field_metadata(const Context& ctx, const std::string& module, const ojson& extra) {
  ojson m = stamp(ctx, module);
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  return m.dump();
}

Point point_from(const Config& cfg, const std::string& key, int dim) {
  const std::vector<double> x = cfg.list(key, std::vector<double>(dim, 0.0));
  if (static_cast<int>(x.size()) != dim) throw ConfigError(key + ": needs " + std::to_string(dim) + " coordinates");
  return x;
}

Init init_from(const Config& cfg) {
  InitSpec s;
  const std::string preset = cfg.str("variational.init", "auto");
  if (preset == "auto")
    s.preset = InitPreset::Auto;
  else if (preset == "gaussian")
    s.preset = InitPreset::Gaussian;
  else if (preset == "sech")
    s.preset = InitPreset::Sech;
  else
    throw ConfigError("variational.init: expected auto, gaussian or sech, got '" + preset + "'");
  s.width = cfg.num("variational.width", 0.0);
  return s;
}

int run_variational(const Context& ctx, std::ostream& out) {
  const KernelSpec kernel = kernel_from_config(ctx.cfg);
  const Grid grid = grid_from_config(ctx.cfg, kernel.dimension);
  const FunctionalSpec spec = functional_from_config(ctx.cfg, kernel);
  const SolveOptions opts = solve_options_from_config(ctx.cfg);
  const MaximizerResult res = solve_maximizer(spec, grid, init_from(ctx.cfg), opts);
  const ojson row = {{"kind", to_string(spec.kind)},
                     {"family", to_string(kernel.family)},
                     {"dimension", kernel.dimension},
                     {"sigma", kernel.sigma},
                     {"kappa", spec.kappa},
                     {"radius", grid.radius},
                     {"n", grid.n},
                     {"value", res.value},
                     {"iterations", res.iterations},
                     {"residual", res.residual}};
  write_field(ctx.out_dir / "variational_maximizer.pamf", res.maximizer,
              field_metadata(ctx, "variational", {{"kind", to_string(spec.kind)}, {"value", res.value}}));
  if (opts.keep_trace) {
    std::ofstream tf(ctx.out_dir / "variational_trace.csv", std::ios::binary);
    write_trace_csv(tf, res);
  }
  emit(ctx, out, "variational", render(ctx, "variational", {row}));
  return kOk;
}

int run_noise(const Context& ctx, std::ostream& out) {
  const MollifiedKernelSpec mk = mollified_kernel_from_config(ctx.cfg);
  const Grid grid = grid_from_config(ctx.cfg, mk.base.dimension);
  const long long replicas = ctx.cfg.integer("noise.replicas", 1);
  if (replicas < 1) throw ConfigError("noise.replicas: must be >= 1");
  NoiseSampler sampler(mk, grid);
  std::vector<ojson> rows;
  for (std::uint64_t seed : ctx.seeds)
    for (long long r = 0; r < replicas; ++r) {
      const Field f = sampler.sample(seed, r);
      double mean = 0.0, var = 0.0;
      for (double v : f.values()) mean += v;
      mean /= f.size();
      for (double v : f.values()) var += (v - mean) * (v - mean);
      var /= f.size();
      const std::string name = "noise_" + std::to_string(seed) + "_" + std::to_string(r) + ".pamf";
      write_field(ctx.out_dir / name, f, field_metadata(ctx, "noise", {{"seed", seed}, {"replica", r}}));
      rows.push_back({{"seed", seed},
                      {"replica", r},
                      {"file", name},
                      {"mean", mean},
                      {"variance", var},
                      {"pointwise_variance", sampler.pointwise_variance()},
                      {"min", f.min()},
                      {"max", f.max()}});
    }
  emit(ctx, out, "noise-sample", render(ctx, "noise", rows));
  return kOk;
}

int run_pam(const Context& ctx, std::ostream& out) {
  const MollifiedKernelSpec mk = mollified_kernel_from_config(ctx.cfg);
  const Grid grid = grid_from_config(ctx.cfg, mk.base.dimension);
  PamSolveConfig solver = solver_from_config(ctx.cfg);
  solver.workers = ctx.workers;
  const double t = ctx.cfg.num("pam.t");
  if (!(t > 0.0)) throw ConfigError("pam.t: must be positive");
  const Point x = point_from(ctx.cfg, "pam.x", grid.dim);
  NoiseSampler sampler(mk, grid);
  std::vector<ojson> rows;
  for (std::uint64_t seed : ctx.seeds) {
    const Field V = sampler.sample(seed, 0);
    ojson row = {{"seed", seed}, {"method", to_string(solver.method)}, {"boundary", to_string(solver.boundary)},
                 {"t", t}};
    if (solver.method == PamMethod::MC) {
      std::optional<Box> box;
      if (solver.boundary == Boundary::DirichletBox) box = Box{grid.radius};
      const McEstimate e = feynman_kac(V, t, x, solver.n_paths, solver.dt, seed, box, solver.kappa, ctx.workers);
      row["estimate"] = e.estimate;
      row["stderr"] = e.stderr_;
      row["n_paths"] = e.n_paths;
    } else {
      const Field u = solve_field(V, t, solver);
      const std::string name = "pam_" + std::to_string(seed) + ".pamf";
      write_field(ctx.out_dir / name, u, field_metadata(ctx, "pam", {{"seed", seed}, {"t", t}}));
      row["estimate"] = u.interpolate(x);
      row["min"] = u.min();
      row["max"] = u.max();
      row["file"] = name;
    }
    rows.push_back(row);
  }
  emit(ctx, out, "pam-solve", render(ctx, "pam", rows));
  return kOk;
}

void guard(const MollifiedKernelSpec& mk, double t, double p, double limit) {
  const double g0 = mollified_gamma(mk, Point(mk.base.dimension, 0.0));
  const double H = (p * t) * (p * t) * g0 / 2.0;
  if (H > limit)
    throw ConfigError("moments: predicted H = (pt)^2 gamma_eps(0)/2 = " + std::to_string(H) + " at p = " +
                      std::to_string(p) + ", epsilon = " + std::to_string(mk.epsilon) + " exceeds the guard " +
                      std::to_string(limit));
}

int run_moments(const Context& ctx, std::ostream& out) {
  const Config& cfg = ctx.cfg;
  const KernelSpec kernel = kernel_from_config(cfg);
  const std::string mode = cfg.str("moments.mode", "estimate");
  const double t = cfg.num("moments.t");
  if (!(t > 0.0)) throw ConfigError("moments.t: must be positive");
  const double limit = cfg.num("moments.guard", 20.0);
  const std::vector<double> ps = cfg.list("moments.p", {1.0});
  for (double p : ps)
    if (!(p > 0.0)) throw ConfigError("moments.p: values must be positive");
  std::vector<ojson> rows;

  if (mode == "scan") {
    const std::vector<double> eps = cfg.list("moments.epsilons");
    for (double e : eps)
      for (double p : ps) guard({kernel, e}, t, p, limit);
    ScanBudget b;
    b.n_noise = static_cast<int>(cfg.integer("moments.n_noise", 1000));
    b.bootstrap = static_cast<int>(cfg.integer("moments.bootstrap", 1000));
    b.setup.grid = grid_from_config(cfg, kernel.dimension);
    b.setup.solver = solver_from_config(cfg);
    b.setup.workers = ctx.workers;
    ojson runs = ojson::array();
    for (std::uint64_t seed : ctx.seeds) {
      b.setup.seed = seed;
      const ScanResult r = intermittency_scan(kernel, t, eps, ps, b);
      for (const ScanRow& s : r.rows)
        rows.push_back({{"seed", seed},
                        {"epsilon", s.epsilon},
                        {"t", s.t},
                        {"p", s.p},
                        {"log_moment", s.log_moment},
                        {"stderr", s.stderr_log},
                        {"A", s.A},
                        {"ell_hat", s.ell_hat},
                        {"ell_hat_over_p", s.ell_hat_over_p}});
      runs.push_back({{"seed", seed}, {"verdict", r.verdict}, {"bootstrap_confidence", r.bootstrap_confidence}});
    }
    ojson summary = stamp(ctx, "moments");
    summary["scans"] = runs;
    std::ofstream sf(ctx.out_dir / "moments_summary.json", std::ios::binary);
    sf << summary.dump(2) << "\n";
    emit(ctx, out, "moments", render(ctx, "moments", rows, {{"scans", runs}}));
    return kOk;
  }

  const MollifiedKernelSpec mk = mollified_kernel_from_config(cfg);
  for (double p : ps) guard(mk, t, p, limit);

  if (mode == "replica") {
    const int n = static_cast<int>(cfg.integer("moments.n_samples", 10000));
    const double dt = cfg.num("moments.dt", 0.02);
    const double kappa = cfg.num("solver.kappa", 1.0);
    for (std::uint64_t seed : ctx.seeds)
      for (double p : ps) {
        if (p != std::floor(p)) throw ConfigError("moments.p: replica mode needs integer p");
        const McEstimate e = replica_moment(mk, t, static_cast<int>(p), n, dt, seed, kappa, ctx.workers);
        rows.push_back({{"seed", seed}, {"epsilon", mk.epsilon}, {"t", t}, {"p", p}, {"estimate", e.estimate},
                        {"stderr", e.stderr_}, {"n_samples", n}});
      }
    emit(ctx, out, "moments", render(ctx, "moments", rows));
    return kOk;
  }

  if (mode != "estimate") throw ConfigError("moments.mode: expected estimate, replica or scan, got '" + mode + "'");
  MomentSetup setup;
  setup.grid = grid_from_config(cfg, kernel.dimension);
  setup.solver = solver_from_config(cfg);
  setup.workers = ctx.workers;
  const Point x = point_from(cfg, "moments.x", kernel.dimension);
  const int n_noise = static_cast<int>(cfg.integer("moments.n_noise", 100));
  std::optional<Regime> regime;
  double g1 = 0.0;
  if (cfg.has_section("regime")) {
    regime = regime_from_config(cfg, scaling_exponent(kernel));
    g1 = cfg.num("regime.gamma1_at_0", mollified_gamma({kernel, 1.0}, Point(kernel.dimension, 0.0)));
  }
  for (std::uint64_t seed : ctx.seeds) {
    setup.seed = seed;
    const auto u = solution_samples(mk, t, x, n_noise, setup);
    for (double p : ps) {
      const MomentEstimate e =
          moment_from_samples(u, p, t, mk.epsilon, setup.solver.method == PamMethod::MC ? setup.solver.n_paths : 0);
      ojson row = {{"seed", seed},          {"epsilon", e.epsilon}, {"t", e.t},
                   {"p", e.p},              {"value", e.value},     {"log_value", e.log_value},
                   {"stderr_log", e.stderr_log}, {"n_noise", e.n_noise}};
      if (regime) row["normalized_log_moment"] = normalized_log_moment(e, *regime, scaling_exponent(kernel), g1);
      rows.push_back(row);
    }
  }
  emit(ctx, out, "moments", render(ctx, "moments", rows));
  return kOk;
}

int run_regime_table(const Context& ctx, std::ostream& out) {
  const Config& cfg = ctx.cfg;
  std::optional<KernelSpec> kernel;
  if (cfg.has_section("kernel")) kernel = kernel_from_config(cfg);
  double omega;
  if (cfg.has("regime.omega"))
    omega = cfg.num("regime.omega");
  else if (kernel)
    omega = scaling_exponent(*kernel);
  else
    throw ConfigError("regime.omega: missing (and no [kernel] section to derive it from)");
  double g1;
  if (cfg.has("regime.gamma1_at_0"))
    g1 = cfg.num("regime.gamma1_at_0");
  else if (kernel)
    g1 = mollified_gamma({*kernel, 1.0}, Point(kernel->dimension, 0.0));
  else
    throw ConfigError("regime.gamma1_at_0: missing (and no [kernel] section to derive it from)");
  const Regime regime = regime_from_config(cfg, omega);
  const std::vector<double> eps = cfg.list("regime.epsilon", {1.0});
  const std::vector<double> ts = cfg.list("regime.t");
  const std::vector<double> ps = cfg.list("regime.p", {1.0});
  std::vector<ojson> rows;
  for (double e : eps)
    for (double t : ts)
      for (double p : ps) {
        const ScalingTriple s = scaling_functions(regime, e, p * t, g1, omega);
        rows.push_back({{"regime", to_string(regime.tag)},
                        {"frak_c", regime.frak_c},
                        {"limit_t", regime.limit_t},
                        {"omega", omega},
                        {"epsilon", e},
                        {"t", t},
                        {"p", p},
                        {"alpha", s.alpha},
                        {"beta", s.beta},
                        {"H", s.H}});
      }
  emit(ctx, out, "regime-table", render(ctx, "scaling", rows));
  return kOk;
}

int run_acceptance_command(const Context& ctx, std::ostream& out) {
  std::vector<int> only;
  for (double c : ctx.cfg.list("acceptance.criteria", {})) only.push_back(static_cast<int>(c));
  const auto results = run_acceptance(out, ctx.workers, only);
  std::vector<ojson> rows;
  bool all = true;
  for (const auto& r : results) {
    rows.push_back({{"criterion", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    all = all && r.pass;
  }
  const std::string text = render(ctx, "acceptance", rows);
  std::ofstream f(ctx.out_dir / ("acceptance." + ctx.format), std::ios::binary);
  f << text;
  return all ? kOk : kFailed;
}

} // namespace

int run(Config cfg, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    Context ctx;
    if (opts.seed) cfg.set("run.seeds", std::to_string(*opts.seed));
    ctx.command = opts.command ? *opts.command : cfg.str("run.command");
    cfg.set("run.command", ctx.command);
    ctx.format = opts.format ? *opts.format : cfg.str("run.format", "json");
    if (ctx.format != "json" && ctx.format != "csv")
      throw ConfigError("run.format: expected csv or json, got '" + ctx.format + "'");
    ctx.workers = opts.workers ? *opts.workers : static_cast<int>(cfg.integer("run.workers", 1));
    if (ctx.workers < 1) throw ConfigError("run.workers: must be >= 1");
    ctx.out_dir = opts.out_dir ? *opts.out_dir : fs::path(cfg.str("run.out", "."));
    for (double s : cfg.list("run.seeds", {0.0})) {
      if (s < 0 || s != std::floor(s)) throw ConfigError("run.seeds: seeds must be nonnegative integers");
      ctx.seeds.push_back(static_cast<std::uint64_t>(s));
    }
    // the hash covers what determines the results, not where they go
    Config hashed = cfg;
    hashed.set("run.out", "");
    hashed.set("run.workers", "");
    hashed.set("run.format", "");
    ctx.hash = hashed.hash();
    ctx.cfg = std::move(cfg);
    fs::create_directories(ctx.out_dir);

    if (ctx.command == "variational") return run_variational(ctx, out);
    if (ctx.command == "noise-sample") return run_noise(ctx, out);
    if (ctx.command == "pam-solve") return run_pam(ctx, out);
    if (ctx.command == "moments") return run_moments(ctx, out);
    if (ctx.command == "regime-table") return run_regime_table(ctx, out);
    if (ctx.command == "acceptance") return run_acceptance_command(ctx, out);
    throw ConfigError("run.command: unknown command '" + ctx.command + "'");
  } catch (const ConfigError& e) {
    err << "ConfigError: " << e.what() << "\n";
    return kConfigInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kModuleError;
  }
}

} // namespace pamlab
