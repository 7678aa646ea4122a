#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>

#include "fpl/lattice.hpp"

namespace fpl {

/// Collision kernel S(u) = |u|^{lambda+2} (I - u u^T / |u|^2), truncated to
/// the ball |u| < trunc_radius.
struct KernelParams {
  double lambda = 0.0;
  double trunc_radius = 1.0;
  int quad_points = 256;

  void validate() const;
  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

/// Isotropic decomposition S^(w) = A(|w|) I + B(|w|) w w^T / |w|^2.
struct RadialProfile {
  double A = 0.0;
  double B = 0.0;
};

/// S^(w) = (2 pi)^{-3/2} int_{|u|<R} S(u) e^{-i w.u} du reduced to two radial
/// integrals, each evaluated by composite Gauss-Legendre quadrature and
/// checked against a refined rule (relative change <= 1e-8).
RadialProfile radial_profiles(const KernelParams& params, double rho);

/// (2 pi)^{-3/2} int_{|u|<R} |u|^{lambda+2} e^{-i w.u} du at |w| = rho; by the
/// trace identity tr S^ = 3A + B equals twice this value.
double radial_power_transform(const KernelParams& params, double rho);

/// Upper-triangle ordering of the six independent components of S^.
inline constexpr std::array<std::pair<int, int>, 6> kSymmetricPairs{
    {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

/// Per-mode Fourier transform of the truncated collision matrix on the dual
/// lattice of a grid. Column c of s_hat holds component kSymmetricPairs[c].
struct WeightTable {
  GridSpec grid;
  KernelParams params;
  Eigen::Array<double, Eigen::Dynamic, 6> s_hat;
  Eigen::ArrayXd a_scalar;  // w^T S^(w) w
  std::uint64_t checksum = 0;

  Eigen::Matrix3d matrix(Eigen::Index mode) const;
};

/// Builds the table for every mode of the grid. Throws NumericalError if the
/// isotropic structure or the trace identity fails on the built table.
WeightTable build_table(const GridSpec& grid, const KernelParams& params);

std::uint64_t table_checksum(const WeightTable& table);

/// Weight-cache file: 64-byte little-endian header ("FPLW", version, N,
/// lambda, L, R, quad_points, checksum, reserved) followed by six float64
/// s_hat components per mode and then the a_scalar array.
void save_table(const WeightTable& table, const std::filesystem::path& path);

/// Loads and validates the checksum. Throws FormatError on any mismatch.
WeightTable load_table(const std::filesystem::path& path);

/// As above, and additionally requires the header to match grid and params.
WeightTable load_table(const std::filesystem::path& path, const GridSpec& grid,
                       const KernelParams& params);

}  // namespace fpl
