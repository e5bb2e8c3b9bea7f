#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pamlab/config.hpp"
#include "pamlab/errors.hpp"
#include "pamlab/field_io.hpp"
#include "pamlab/runner.hpp"

using namespace pamlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pamlab_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

const char* kVariational = R"(
[run]
command = variational

[kernel]
family = white
dimension = 1

[grid]
radius = 20
n = 256

[variational]
kind = SubM
kappa = 1
)";

} // namespace

TEST_CASE("config parsing and lookups") {
  const Config cfg = Config::parse("; comment\n[a]\nx = 1.5\nlist = 1, 2 3\nname = white\n[b]\non = true\n");
  CHECK(cfg.has("a.x"));
  CHECK(cfg.has_section("b"));
  CHECK_FALSE(cfg.has_section("c"));
  CHECK(cfg.num("a.x") == 1.5);
  CHECK(cfg.num("a.missing", 4.0) == 4.0);
  CHECK(cfg.list("a.list") == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(cfg.str("a.name") == "white");
  CHECK(cfg.flag("b.on", false));
  CHECK_THROWS_AS(cfg.num("a.name"), ConfigError);
  CHECK_THROWS_AS(cfg.integer("a.x"), ConfigError);
  CHECK_THROWS_AS(cfg.str("a.missing"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[a\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/pamlab.ini"), ConfigError);
}

TEST_CASE("config hash is stable and content sensitive") {
  const Config a = Config::parse("[k]\nx = 1\ny = 2\n");
  const Config b = Config::parse("[k]\ny = 2\nx = 1\n");
  const Config c = Config::parse("[k]\nx = 1\ny = 3\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash().size() == 64);
  CHECK(a.canonical() == "k.x = 1\nk.y = 2\n");
}

TEST_CASE("builders read their sections") {
  const Config cfg = Config::parse(
      "[kernel]\nfamily = riesz\ndimension = 2\nomega = 1\nsigma = 2\nepsilon = 0.3\n"
      "[grid]\nradius = 4\nn = 32\n"
      "[solver]\nmethod = mc\nboundary = large-box\ndt = 0.01\nn_paths = 50\n");
  const MollifiedKernelSpec mk = mollified_kernel_from_config(cfg);
  CHECK(mk.base.family == KernelFamily::Riesz);
  CHECK(mk.base.omega == 1.0);
  CHECK(mk.base.sigma == 2.0);
  CHECK(mk.epsilon == 0.3);
  const Grid g = grid_from_config(cfg, 2);
  CHECK(g.n == 32);
  CHECK(g.radius == 4.0);
  const PamSolveConfig s = solver_from_config(cfg);
  CHECK(s.method == PamMethod::MC);
  CHECK(s.boundary == Boundary::LargeBoxApprox);
  CHECK(s.n_paths == 50);
  CHECK_THROWS_AS(kernel_from_config(Config::parse("[kernel]\nfamily = blue\ndimension = 1\n")), ConfigError);
  CHECK_THROWS_AS(kernel_from_config(Config::parse("[kernel]\nfamily = riesz\ndimension = 1\nomega = 3\n")),
                  ConfigError);
  const Regime r = regime_from_config(Config::parse("[regime]\ntag = Crt2\nlimit_t = 2\n"), 2.0);
  CHECK(r.tag == RegimeTag::Crt2);
  CHECK(r.limit_t == 2.0);
}

TEST_CASE("field files round trip") {
  const Grid grid(2, 1.5, 8);
  const Field f = Field::from_function(grid, [](const Point& x) { return std::sin(x[0]) + x[1] * x[1]; });
  std::stringstream ss;
  write_field(ss, f, R"({"seed":3})");
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "PAMF");
  std::istringstream in(bytes);
  const FieldFile back = read_field(in);
  CHECK(back.metadata == R"({"seed":3})");
  CHECK(back.field.grid().dim == 2);
  CHECK(back.field.grid().n == 8);
  CHECK(back.field.grid().radius == 1.5);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(back.field[i] == f[i]);

  std::istringstream cut(bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(read_field(cut), FormatError);
  std::istringstream bad("JUNKJUNKJUNK");
  CHECK_THROWS_AS(read_field(bad), FormatError);

  std::ostringstream csv;
  write_field_csv(csv, f);
  const std::string text = csv.str();
  CHECK(text.rfind("x0,x1,value\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 65);
}

TEST_CASE("variational command") {
  const fs::path dir = scratch("variational");
  RunOptions opts;
  opts.out_dir = dir;
  std::ostringstream out, err;
  REQUIRE(run(Config::parse(kVariational), opts, out, err) == kOk);
  const auto doc = nlohmann::json::parse(slurp(dir / "variational.json"));
  CHECK(doc.at("module") == "variational");
  CHECK(doc.at("version") == kVersion);
  CHECK(doc.at("config_hash").get<std::string>().size() == 64);
  CHECK(doc.at("rows").at(0).at("value").get<double>() == doctest::Approx(1.0 / 48.0).epsilon(2e-2));
  CHECK(fs::exists(dir / "variational_maximizer.pamf"));
  const FieldFile m = read_field(dir / "variational_maximizer.pamf");
  CHECK(m.field.l2_norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(out.str() == slurp(dir / "variational.json"));
}

TEST_CASE("regime table command") {
  const fs::path dir = scratch("regime");
  RunOptions opts;
  opts.out_dir = dir;
  opts.format = "csv";
  std::ostringstream out, err;
  const Config cfg = Config::parse(
      "[run]\ncommand = regime-table\n[regime]\nomega = 1\ngamma1_at_0 = 1\ne_coef = 1\ne_exp = 0\n"
      "t_coef = 1\nt_exp = 1\nepsilon = 1\nt = 16\n");
  REQUIRE(run(cfg, opts, out, err) == kOk);
  const std::string csv = slurp(dir / "regime-table.csv");
  CHECK(csv.rfind("module,version,config_hash,", 0) == 0);
  CHECK(csv.find("Sub1") != std::string::npos);
}

TEST_CASE("malformed configs exit with status 2") {
  const fs::path dir = scratch("bad");
  RunOptions opts;
  opts.out_dir = dir;
  std::ostringstream out, err;
  Config cfg = Config::parse(kVariational);
  cfg.set("kernel.family", "blue");
  CHECK(run(cfg, opts, out, err) == kConfigInvalid);
  CHECK(err.str().find("kernel.family") != std::string::npos);

  std::ostringstream err2;
  CHECK(run(Config::parse("[run]\ncommand = dance\n"), opts, out, err2) == kConfigInvalid);
  std::ostringstream err3;
  RunOptions csv = opts;
  csv.format = "xml";
  CHECK(run(Config::parse(kVariational), csv, out, err3) == kConfigInvalid);
}

TEST_CASE("module errors exit with status 3") {
  const fs::path dir = scratch("module");
  RunOptions opts;
  opts.out_dir = dir;
  std::ostringstream out, err;
  const Config cfg = Config::parse(
      "[run]\ncommand = pam-solve\n[kernel]\nfamily = white\ndimension = 1\nepsilon = 0.5\n"
      "[grid]\nradius = 1\nn = 32\n[pam]\nt = 0.5\n[solver]\nmethod = pde\nscheme = explicit\ndt = 0.01\n");
  CHECK(run(cfg, opts, out, err) == kModuleError);
  CHECK(err.str().find("exceeds") != std::string::npos);

  // a functional that does not fit the kernel is a configuration problem
  Config bad = Config::parse(kVariational);
  bad.set("kernel.dimension", "2");
  bad.set("grid.n", "16");
  std::ostringstream err2;
  CHECK(run(bad, opts, out, err2) == kConfigInvalid);
}

TEST_CASE("outputs do not depend on the worker count") {
  const Config cfg = Config::parse(
      "[run]\ncommand = pam-solve\nseeds = 4\n[kernel]\nfamily = white\ndimension = 1\nepsilon = 0.5\n"
      "[grid]\nradius = 3\nn = 64\n[pam]\nt = 0.5\nx = 0.2\n[solver]\nmethod = mc\ndt = 0.01\nn_paths = 400\n");
  std::string first;
  for (int w : {1, 3}) {
    const fs::path dir = scratch("workers" + std::to_string(w));
    RunOptions opts;
    opts.out_dir = dir;
    opts.workers = w;
    std::ostringstream out, err;
    REQUIRE(run(cfg, opts, out, err) == kOk);
    const std::string text = slurp(dir / "pam-solve.json");
    if (first.empty())
      first = text;
    else
      CHECK(text == first);
  }
}

TEST_CASE("noise command writes one file per replica") {
  const fs::path dir = scratch("noise");
  RunOptions opts;
  opts.out_dir = dir;
  opts.seed = 9;
  std::ostringstream out, err;
  const Config cfg = Config::parse(
      "[run]\ncommand = noise-sample\n[kernel]\nfamily = white\ndimension = 1\nepsilon = 0.2\n"
      "[grid]\nradius = 2\nn = 32\n[noise]\nreplicas = 2\n");
  REQUIRE(run(cfg, opts, out, err) == kOk);
  CHECK(fs::exists(dir / "noise_9_0.pamf"));
  CHECK(fs::exists(dir / "noise_9_1.pamf"));
  const FieldFile a = read_field(dir / "noise_9_0.pamf");
  const auto meta = nlohmann::json::parse(a.metadata);
  CHECK(meta.at("seed") == 9);
}
