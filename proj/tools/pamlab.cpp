#include <CLI11.hpp>

#include <iostream>

#include "pamlab/config.hpp"
#include "pamlab/errors.hpp"
#include "pamlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pamlab: numerical experiments for the smoothed parabolic Anderson model"};
  std::string config_path;
  std::string command;
  std::uint64_t seed = 0;
  std::string out_dir;
  int workers = 1;
  std::string format;
  app.add_option("command", command,
                 "variational | noise-sample | pam-solve | moments | regime-table | acceptance (default: [run] command)");
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "single seed replacing [run] seeds");
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  auto* workers_opt = app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  auto* format_opt = app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  CLI11_PARSE(app, argc, argv);

  pamlab::Config cfg;
  try {
    if (!config_path.empty()) cfg = pamlab::Config::load(config_path);
  } catch (const pamlab::ConfigError& e) {
    std::cerr << "ConfigError: " << e.what() << "\n";
    return pamlab::kConfigInvalid;
  }
  pamlab::RunOptions opts;
  if (!command.empty()) opts.command = command;
  if (*seed_opt) opts.seed = seed;
  if (*out_opt) opts.out_dir = out_dir;
  if (*workers_opt) opts.workers = workers;
  if (*format_opt) opts.format = format;
  return pamlab::run(cfg, opts, std::cout, std::cerr);
}
