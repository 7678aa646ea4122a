#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "fpl/lattice.hpp"

namespace fpl {

/// M(v) = rho0 (2 pi T0)^{-3/2} exp(-|v - V0|^2 / (2 T0)).
struct MaxwellianSpec {
  double rho0 = 1.0;
  std::array<double, 3> V0{0.0, 0.0, 0.0};
  double T0 = 1.0;

  void validate() const;
};

VelocityField maxwellian_field(const MaxwellianSpec& spec, const GridSpec& grid);

/// Density, bulk velocity and temperature by midpoint quadrature. T is taken
/// about V; T_raw about the origin. Non-positive density sets `degenerate`
/// and leaves V, T, T_raw at zero.
struct Moments {
  double rho = 0.0;
  std::array<double, 3> V{0.0, 0.0, 0.0};
  double T = 0.0;
  double T_raw = 0.0;
  bool degenerate = false;
};
Moments moments(const VelocityField& f);

/// Equilibrium with the same mass, momentum and energy as f.
MaxwellianSpec equilibrium_of(const VelocityField& f);

/// m_k(f) = int |f| <v>^k.
double weighted_moment(const VelocityField& f, double k);

double l2_norm(const VelocityField& f);
/// ||f <v>^k||_2.
double l2_weighted(const VelocityField& f, double k);

/// (sum_{|alpha| <= s} ||D^alpha f <v>^k||_2^2)^{1/2}, derivatives spectral.
double hs_norm(const VelocityField& f, int s, double k_weight = 0.0);

/// int f ln f over cells with f > 1e-30; other cells contribute nothing.
double entropy(const VelocityField& f);

/// int_{f<0} |f| <v>^2 / int_{f>=0} f <v>^2 (0 when f >= 0 everywhere).
double stability_ratio(const VelocityField& f);

double distance(const VelocityField& f, const VelocityField& g);

/// lhs = ||(1 - Pi) f||_2 for the mode projection keeping |k_i| < n_keep / 2,
/// rhs = (2 pi)^{-3/2} (L / (2 pi M))^s ||f||_{H^s} with M = n_keep / 2.
/// tail_hs is ||(1 - Pi) f||_{H^s}; lhs <= 2^s scale tail_hs always holds on
/// this lattice, so empirical_constant() lies in [0, 2^s].
struct TailBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double tail_hs = 0.0;
  double scale = 0.0;  // (L / (2 pi M))^s

  double empirical_constant() const { return tail_hs > 0.0 ? lhs / (scale * tail_hs) : 0.0; }
};
TailBound tail_bound_check(const VelocityField& f, int s, int n_keep);

struct DiagnosticsOptions {
  double k_max = 4.0;     // highest tracked moment order
  double l2_weight = 2.0;  // k of the weighted L2 norm
};

/// One row of the diagnostics stream.
struct DiagnosticsRecord {
  double t = 0.0;
  std::int64_t step = 0;
  Moments mom;
  double mass = 0.0;
  std::array<double, 3> momentum{0.0, 0.0, 0.0};
  double energy = 0.0;
  double m0 = 0.0, m2 = 0.0, m3 = 0.0, m_kmax = 0.0;
  double l2 = 0.0, l2_weighted = 0.0;
  double h1 = 0.0, h2 = 0.0;
  double entropy = 0.0;
  double neg_ratio = 0.0;
  double dist_to_eq = 0.0;
  double correction_norm = 0.0;
  double tail_norm = 0.0;

  /// Column names and values in a fixed order.
  static std::vector<std::string> names();
  std::vector<double> values() const;
};

/// Every observable of f except the two operator-side norms, which the caller
/// supplies from its last collision evaluation.
DiagnosticsRecord make_record(const VelocityField& f, double t, std::int64_t step,
                              const VelocityField& equilibrium, double correction_norm,
                              double tail_norm, const DiagnosticsOptions& options = {});

}  // namespace fpl
