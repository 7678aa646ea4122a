#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fpl::app {

struct SuiteResult {
  std::string name;
  std::string title;
  bool passed = false;
  std::string summary;               // one line with the headline numbers
  std::vector<std::string> details;  // tables and per-case values
  double seconds = 0.0;
};

/// conservation, projection, oracle, maxwellian, relaxation, tail, order,
/// scaling.
const std::vector<std::string>& suite_names();

/// Runs one suite; progress lines go to `log` when given. Unknown names
/// raise UsageError.
SuiteResult run_suite(const std::string& name, std::uint64_t seed, std::ostream* log = nullptr);

}  // namespace fpl::app
