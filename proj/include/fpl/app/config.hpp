#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fpl/dynamics.hpp"
#include "fpl/error.hpp"

namespace fpl::app {

/// Bad command line or configuration; maps to exit code 2.
class UsageError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct InitialCondition {
  enum class Kind { maxwellian, bi_maxwellian, perturbed };
  Kind kind = Kind::bi_maxwellian;
  double rho0 = 1.0;
  std::array<double, 3> V0{0.0, 0.0, 0.0};
  double T0 = 1.0;
  // Bi-Maxwellian: equal halves centred at V0 -+ separation e_1, each at
  // temperature T0 - separation^2 / 3 so the mixture has temperature T0.
  double separation = 1.0;
  // Perturbed: M (1 + amplitude p) with p a random smooth trigonometric
  // polynomial normalized to max |p| = 1.
  double amplitude = 0.2;

  void validate() const;
  /// Bounding-Gaussian half length plus the largest centre offset.
  double auto_half_length(double tail_tol) const;
  VelocityField sample(const GridSpec& grid, std::uint64_t seed) const;
};

std::string_view to_string(InitialCondition::Kind kind);

struct RunConfig {
  SolverConfig solver;
  InitialCondition initial;
  bool auto_half_length = true;
  double tail_tol = 1e-6;
  std::int64_t snapshot_stride = 0;  // 0: initial and final snapshots only

  /// Every setting as section.key = value, after defaults are applied.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// INI text with sections [grid], [kernel], [time], [solver], [initial],
/// [run]. Missing keys take defaults; unknown keys are rejected.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace fpl::app
