#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "pamlab/config.hpp"

namespace pamlab {

inline constexpr const char* kVersion = "1.0.0";

struct RunOptions {
  std::optional<std::string> command;  // overrides [run] command
  std::optional<std::uint64_t> seed;   // replaces [run] seeds
  std::optional<std::filesystem::path> out_dir;
  std::optional<int> workers;
  std::optional<std::string> format;  // csv | json
};

enum ExitStatus { kOk = 0, kFailed = 1, kConfigInvalid = 2, kModuleError = 3 };

/// Runs one experiment: writes artifacts to the output directory and the
/// main result table to `out`. Returns an ExitStatus; errors are reported on
/// `err` verbatim.
int run(Config cfg, const RunOptions& opts, std::ostream& out, std::ostream& err);

} // namespace pamlab
