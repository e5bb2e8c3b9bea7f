#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace pamlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the acceptance criteria (all when `only` is empty), printing one
/// "criterion N: PASS|FAIL name | detail" line per criterion to `os` as each
/// completes.
std::vector<CriterionResult> run_acceptance(std::ostream& os, int workers = 1, const std::vector<int>& only = {});

std::string format_result(const CriterionResult& r);

} // namespace pamlab
