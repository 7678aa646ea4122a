#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "fpl/app/io.hpp"

namespace fpl::app {

enum ExitCode : int { exit_ok = 0, exit_usage = 2, exit_numerical = 3, exit_halted = 4 };

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out = "fpl-out";
  std::string suite;  // empty or "all": every suite
  std::optional<std::uint64_t> seed;
};

int cmd_precompute(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_analyze(const CommandOptions& opts, std::ostream& out, std::ostream& err);

struct Analysis {
  std::size_t records = 0;
  double decay_rate = 0.0;  // of ||g - M||_2 from a least-squares fit of its log
  double half_life = 0.0;
  double fit_r2 = 0.0;
  long entropy_violations = 0;  // steps where H grows by more than 1e-8
  double max_entropy_increase = 0.0;
  double mass_drift = 0.0;      // relative to the initial value
  double momentum_drift = 0.0;  // relative to sqrt(mass * energy)
  double energy_drift = 0.0;
  double max_neg_ratio = 0.0;
  double final_distance = 0.0;
};

/// Throws FormatError("no records") on an empty table.
Analysis analyze(const DiagnosticsTable& table);

}  // namespace fpl::app
