#include "fpl/diagnostics.hpp"

#include <cmath>
#include <numbers>

#include "fpl/conserve.hpp"

namespace fpl {

namespace {

constexpr double kEntropyFloor = 1e-30;

Eigen::ArrayXd bracket_pow(const GridSpec& g, double k) {
  const GridCoordinates x(g);
  return (1.0 + x.speed_sq).pow(0.5 * k);
}

// All multi-indices alpha in N^3 with |alpha| <= s.
std::vector<std::array<int, 3>> multi_indices(int s) {
  std::vector<std::array<int, 3>> out;
  for (int a = 0; a <= s; ++a)
    for (int b = 0; a + b <= s; ++b)
      for (int c = 0; a + b + c <= s; ++c) out.push_back({a, b, c});
  return out;
}

}  // namespace

void MaxwellianSpec::validate() const {
  if (!(rho0 > 0.0) || !(T0 > 0.0))
    throw InvalidArgument("MaxwellianSpec: rho0 and T0 must be positive");
}

VelocityField maxwellian_field(const MaxwellianSpec& spec, const GridSpec& grid) {
  spec.validate();
  const double norm = spec.rho0 * std::pow(2.0 * std::numbers::pi * spec.T0, -1.5);
  return VelocityField::sample(grid, [&](double a, double b, double c) {
    const double d0 = a - spec.V0[0], d1 = b - spec.V0[1], d2 = c - spec.V0[2];
    return norm * std::exp(-(d0 * d0 + d1 * d1 + d2 * d2) / (2.0 * spec.T0));
  });
}

Moments moments(const VelocityField& f) {
  const Vector5d m = invariant_moments(f);
  Moments out;
  out.rho = m[0];
  if (!(m[0] > 0.0)) {
    out.degenerate = true;
    return out;
  }
  for (int j = 0; j < 3; ++j) out.V[j] = m[j + 1] / m[0];
  const double v2 = out.V[0] * out.V[0] + out.V[1] * out.V[1] + out.V[2] * out.V[2];
  out.T_raw = m[4] / (3.0 * m[0]);
  // int f |v - V|^2 = int f |v|^2 - rho |V|^2.
  out.T = (m[4] - m[0] * v2) / (3.0 * m[0]);
  return out;
}

MaxwellianSpec equilibrium_of(const VelocityField& f) {
  const Moments m = moments(f);
  if (m.degenerate || !(m.T > 0.0))
    throw NumericalError("equilibrium_of: field has no positive density and temperature");
  return {m.rho, m.V, m.T};
}

double weighted_moment(const VelocityField& f, double k) {
  return (f.values.abs() * bracket_pow(f.grid, k)).sum() * f.grid.cell_volume();
}

double l2_norm(const VelocityField& f) {
  return std::sqrt(f.values.square().sum() * f.grid.cell_volume());
}

double l2_weighted(const VelocityField& f, double k) {
  return std::sqrt((f.values * bracket_pow(f.grid, k)).square().sum() * f.grid.cell_volume());
}

double hs_norm(const VelocityField& f, int s, double k_weight) {
  if (s < 0) throw InvalidArgument("hs_norm: s must be >= 0");
  if (s == 0) return k_weight == 0.0 ? l2_norm(f) : l2_weighted(f, k_weight);
  const GridSpec& g = f.grid;
  const SpectralField F = forward_transform(f);
  const Eigen::ArrayXd w = bracket_pow(g, k_weight);
  double total = 0.0;
  for (const auto& alpha : multi_indices(s)) {
    if (alpha[0] + alpha[1] + alpha[2] == 0) {
      total += (f.values * w).square().sum() * g.cell_volume();
      continue;
    }
    SpectralField D = F;
    for (int axis = 0; axis < 3; ++axis)
      if (alpha[axis] > 0) D = spectral_derivative(D, axis, alpha[axis]);
    const Eigen::ArrayXd d = inverse_transform_complex(D).real();
    total += (d * w).square().sum() * g.cell_volume();
  }
  return std::sqrt(total);
}

double entropy(const VelocityField& f) {
  double h = 0.0;
  for (double x : f.values)
    if (x > kEntropyFloor) h += x * std::log(x);
  return h * f.grid.cell_volume();
}

double stability_ratio(const VelocityField& f) {
  const Eigen::ArrayXd w = bracket_pow(f.grid, 2.0);
  double neg = 0.0, pos = 0.0;
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    if (f.values[i] < 0.0)
      neg -= f.values[i] * w[i];
    else
      pos += f.values[i] * w[i];
  }
  if (neg == 0.0) return 0.0;
  return pos > 0.0 ? neg / pos : INFINITY;
}

double distance(const VelocityField& f, const VelocityField& g) {
  if (!(f.grid == g.grid)) throw InvalidArgument("distance: grid mismatch");
  return l2_norm(VelocityField(f.grid, f.values - g.values));
}

TailBound tail_bound_check(const VelocityField& f, int s, int n_keep) {
  if (n_keep < 2 || n_keep % 2 != 0)
    throw InvalidArgument("tail_bound_check: n_keep must be even and >= 2");
  const GridSpec& g = f.grid;
  const SpectralField F = forward_transform(f);
  const SpectralField kept = project_modes(F, n_keep);
  SpectralField tail = F;
  tail.coeffs -= kept.coeffs;
  TailBound out;
  out.lhs = std::sqrt(tail.coeffs.abs2().sum() * parseval_constant(g));
  const double M = n_keep / 2;
  out.scale = std::pow(g.half_length() / (2.0 * std::numbers::pi * M), s);
  out.rhs = std::pow(2.0 * std::numbers::pi, -1.5) * out.scale * hs_norm(f, s);
  out.tail_hs = hs_norm(inverse_transform(tail), s);
  return out;
}

std::vector<std::string> DiagnosticsRecord::names() {
  return {"t",       "step",     "rho",         "V1",         "V2",        "V3",
          "T",       "T_raw",    "mass",        "momentum1",  "momentum2", "momentum3",
          "energy",  "m0",       "m2",          "m3",         "m_kmax",    "l2",
          "l2_weighted", "h1",   "h2",          "entropy",    "neg_ratio", "dist_to_eq",
          "correction_norm", "tail_norm"};
}

std::vector<double> DiagnosticsRecord::values() const {
  return {t,      double(step), mom.rho,     mom.V[0],    mom.V[1],    mom.V[2],
          mom.T,  mom.T_raw,    mass,        momentum[0], momentum[1], momentum[2],
          energy, m0,           m2,          m3,          m_kmax,      l2,
          l2_weighted, h1,      h2,          entropy,     neg_ratio,   dist_to_eq,
          correction_norm, tail_norm};
}

DiagnosticsRecord make_record(const VelocityField& f, double t, std::int64_t step,
                              const VelocityField& equilibrium, double correction_norm,
                              double tail_norm, const DiagnosticsOptions& options) {
  DiagnosticsRecord r;
  r.t = t;
  r.step = step;
  r.mom = moments(f);
  const Vector5d m = invariant_moments(f);
  r.mass = m[0];
  r.momentum = {m[1], m[2], m[3]};
  r.energy = m[4];
  r.m0 = weighted_moment(f, 0.0);
  r.m2 = weighted_moment(f, 2.0);
  r.m3 = weighted_moment(f, 3.0);
  r.m_kmax = weighted_moment(f, options.k_max);
  r.l2 = l2_norm(f);
  r.l2_weighted = l2_weighted(f, options.l2_weight);
  r.h1 = hs_norm(f, 1);
  r.h2 = hs_norm(f, 2);
  r.entropy = entropy(f);
  r.neg_ratio = stability_ratio(f);
  r.dist_to_eq = distance(f, equilibrium);
  r.correction_norm = correction_norm;
  r.tail_norm = tail_norm;
  return r;
}

}  // namespace fpl
