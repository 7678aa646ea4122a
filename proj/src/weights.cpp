#include "fpl/weights.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "fpl/binary_io.hpp"

namespace fpl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kConvergenceTol = 1e-8;
constexpr int kPanelOrder = 16;
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::string_view kMagic = "FPLW";

// Spherical Bessel combinations needed by the angular reduction:
//   j0(t), j1(t)/t, j2(t)
// with series below t = 0.5 to avoid cancellation.
struct Bessel {
  double j0;
  double j1_over_t;
  double j2;
};

Bessel spherical_bessel(double t) {
  if (t < 0.5) {
    // j_n(t) / t^n = sum_k (-t^2/2)^k / (k! (2n+2k+1)!!)
    const double x = -0.5 * t * t;
    double term0 = 1.0, term1 = 1.0 / 3.0, term2 = 1.0 / 15.0;
    Bessel b{term0, term1, term2};
    for (int k = 1; k < 12; ++k) {
      term0 *= x / (k * (2.0 * k + 1.0));
      term1 *= x / (k * (2.0 * k + 3.0));
      term2 *= x / (k * (2.0 * k + 5.0));
      b.j0 += term0;
      b.j1_over_t += term1;
      b.j2 += term2;
    }
    b.j2 *= t * t;
    return b;
  }
  const double s = std::sin(t), c = std::cos(t);
  const double j0 = s / t;
  const double j1 = s / (t * t) - c / t;
  const double j2 = (3.0 / (t * t) - 1.0) * s / t - 3.0 * c / (t * t);
  return {j0, j1 / t, j2};
}

double prefactor() { return std::pow(2.0 * kPi, -1.5) * 4.0 * kPi; }

struct RadialSums {
  double a;      // int r^{l+4} (j0 - j1/t)
  double b;      // int r^{l+4} j2
  double trace;  // int r^{l+4} j0
};

RadialSums radial_sums(const KernelParams& p, double rho, int panels) {
  using Rule = boost::math::quadrature::gauss<double, kPanelOrder>;
  const double h = p.trunc_radius / panels;
  const double power = p.lambda + 4.0;
  RadialSums s{0.0, 0.0, 0.0};
  for (int i = 0; i < panels; ++i) {
    const double lo = i * h, hi = (i + 1) * h;
    // Three integrands share nodes; integrate each separately with the same rule.
    s.a += Rule::integrate(
        [&](double r) {
          const auto b = spherical_bessel(rho * r);
          return std::pow(r, power) * (b.j0 - b.j1_over_t);
        },
        lo, hi);
    s.b += Rule::integrate(
        [&](double r) { return std::pow(r, power) * spherical_bessel(rho * r).j2; }, lo, hi);
    s.trace += Rule::integrate(
        [&](double r) { return std::pow(r, power) * spherical_bessel(rho * r).j0; }, lo, hi);
  }
  return s;
}

int base_panels(const KernelParams& p, double rho) {
  // At most two radians of oscillation per 16-point panel.
  const int by_phase = int(std::ceil(rho * p.trunc_radius / 2.0));
  return std::max({p.quad_points / kPanelOrder, by_phase, 1});
}

double dc_value(const KernelParams& p) {
  return prefactor() * (2.0 / 3.0) * std::pow(p.trunc_radius, p.lambda + 5.0) /
         (p.lambda + 5.0);
}

RadialSums converged_sums(const KernelParams& p, double rho) {
  const int panels = base_panels(p, rho);
  const RadialSums coarse = radial_sums(p, rho, panels);
  const RadialSums fine = radial_sums(p, rho, 2 * panels);
  // Relative to the DC envelope, which bounds |A| for every rho.
  const double scale = dc_value(p) / prefactor();
  const double err = std::max({std::abs(fine.a - coarse.a), std::abs(fine.b - coarse.b),
                               std::abs(fine.trace - coarse.trace)}) /
                     scale;
  if (err > kConvergenceTol) {
    std::ostringstream msg;
    msg << "radial_profiles: quadrature did not converge at rho = " << rho
        << " (relative change " << err << " > 1e-8)";
    throw NumericalError(msg.str());
  }
  return fine;
}

}  // namespace

void KernelParams::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw InvalidArgument("KernelParams: lambda must lie in [0, 1] (soft potentials out of scope)");
  if (!(trunc_radius > 0.0) || !std::isfinite(trunc_radius))
    throw InvalidArgument("KernelParams: trunc_radius must be positive");
  if (quad_points < 64) throw InvalidArgument("KernelParams: quad_points must be >= 64");
}

RadialProfile radial_profiles(const KernelParams& params, double rho) {
  params.validate();
  if (!(rho >= 0.0)) throw InvalidArgument("radial_profiles: rho must be >= 0");
  if (rho == 0.0) return {dc_value(params), 0.0};
  const RadialSums s = converged_sums(params, rho);
  return {prefactor() * s.a, prefactor() * s.b};
}

double radial_power_transform(const KernelParams& params, double rho) {
  params.validate();
  if (rho == 0.0)
    return prefactor() * std::pow(params.trunc_radius, params.lambda + 5.0) /
           (params.lambda + 5.0);
  return prefactor() * converged_sums(params, rho).trace;
}

Eigen::Matrix3d WeightTable::matrix(Eigen::Index mode) const {
  Eigen::Matrix3d m;
  for (int c = 0; c < 6; ++c) {
    const auto [i, j] = kSymmetricPairs[c];
    m(i, j) = m(j, i) = s_hat(mode, c);
  }
  return m;
}

WeightTable build_table(const GridSpec& grid, const KernelParams& params) {
  params.validate();
  const int n = grid.n();
  const int half = n / 2;
  const int max_k2 = 3 * half * half;
  const double h = grid.dual_spacing();
  const double dc = dc_value(params);

  // Profiles depend only on |k|^2, which is an integer on the lattice.
  std::vector<char> present(max_k2 + 1, 0);
  for (int m0 = 0; m0 < n; ++m0)
    for (int m1 = 0; m1 < n; ++m1)
      for (int m2 = 0; m2 < n; ++m2) {
        const int k2 = grid.mode(m0) * grid.mode(m0) + grid.mode(m1) * grid.mode(m1) +
                       grid.mode(m2) * grid.mode(m2);
        present[k2] = 1;
      }
  std::vector<RadialProfile> profile(max_k2 + 1);
  for (int k2 = 0; k2 <= max_k2; ++k2) {
    if (!present[k2]) continue;
    const double rho = h * std::sqrt(double(k2));
    if (k2 == 0) {
      profile[k2] = {dc, 0.0};
      continue;
    }
    const RadialSums s = converged_sums(params, rho);
    profile[k2] = {prefactor() * s.a, prefactor() * s.b};
    const double trace_gap = std::abs(3.0 * profile[k2].A + profile[k2].B - 2.0 * prefactor() * s.trace);
    if (trace_gap > kConvergenceTol * dc) {
      std::ostringstream msg;
      msg << "build_table: trace identity violated at |k|^2 = " << k2 << " (gap " << trace_gap << ")";
      throw NumericalError(msg.str());
    }
  }

  WeightTable t{grid, params, {}, {}, 0};
  t.s_hat.resize(grid.size(), 6);
  t.a_scalar.resize(grid.size());
  std::vector<Eigen::Vector3d> reference_eigs(max_k2 + 1);
  std::vector<char> seen(max_k2 + 1, 0);
  for (Eigen::Index idx = 0; idx < grid.size(); ++idx) {
    const auto m = grid.unravel(idx);
    const Eigen::Vector3i k(grid.mode(m[0]), grid.mode(m[1]), grid.mode(m[2]));
    const int k2 = k.squaredNorm();
    const Eigen::Vector3d w = h * k.cast<double>();
    const RadialProfile& p = profile[k2];
    Eigen::Matrix3d s = p.A * Eigen::Matrix3d::Identity();
    if (k2 > 0) s += p.B * w * w.transpose() / w.squaredNorm();
    for (int c = 0; c < 6; ++c) t.s_hat(idx, c) = s(kSymmetricPairs[c].first, kSymmetricPairs[c].second);
    const Eigen::Matrix3d stored = t.matrix(idx);
    t.a_scalar[idx] = w.dot(stored * w);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig;
    eig.computeDirect(stored, Eigen::EigenvaluesOnly);
    if (!seen[k2]) {
      reference_eigs[k2] = eig.eigenvalues();
      seen[k2] = 1;
    } else if ((eig.eigenvalues() - reference_eigs[k2]).cwiseAbs().maxCoeff() > 1e-8 * dc) {
      throw NumericalError("build_table: isotropic structure violated at mode " +
                           std::to_string(idx));
    }
  }
  t.checksum = table_checksum(t);
  return t;
}

namespace {

std::string table_payload(const WeightTable& t) {
  ByteWriter w;
  for (Eigen::Index idx = 0; idx < t.grid.size(); ++idx)
    for (int c = 0; c < 6; ++c) w.put_f64(t.s_hat(idx, c));
  w.put_f64_span({t.a_scalar.data(), std::size_t(t.a_scalar.size())});
  return w.bytes();
}

}  // namespace

std::uint64_t table_checksum(const WeightTable& table) { return fnv1a64(table_payload(table)); }

void save_table(const WeightTable& table, const std::filesystem::path& path) {
  ByteWriter w;
  w.put_bytes(kMagic);
  w.put_u32(kFormatVersion);
  w.put_u64(std::uint64_t(table.grid.n()));
  w.put_f64(table.params.lambda);
  w.put_f64(table.grid.half_length());
  w.put_f64(table.params.trunc_radius);
  w.put_u64(std::uint64_t(table.params.quad_points));
  w.put_u64(table.checksum);
  w.put_u64(0);
  w.put_bytes(table_payload(table));
  write_file_atomic(path, w.bytes());
}

WeightTable load_table(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  ByteReader r(bytes);
  if (bytes.size() < 64)
    throw FormatError("weight table " + path.string() + ": header truncated (" +
                      std::to_string(bytes.size()) + " of 64 bytes)");
  if (r.get_bytes(4) != kMagic) throw FormatError("weight table " + path.string() + ": bad magic");
  const auto version = r.get_u32();
  if (version != kFormatVersion)
    throw FormatError("weight table: unsupported format version " + std::to_string(version));
  const auto n = r.get_u64();
  KernelParams params;
  params.lambda = r.get_f64();
  const double L = r.get_f64();
  params.trunc_radius = r.get_f64();
  params.quad_points = int(r.get_u64());
  const auto checksum = r.get_u64();
  r.get_u64();

  const GridSpec grid(int(n), L);
  const std::size_t expected = 7 * std::size_t(grid.size()) * sizeof(double);
  if (r.remaining() != expected)
    throw FormatError("weight table " + path.string() + ": payload length " +
                      std::to_string(r.remaining()) + " bytes, expected " + std::to_string(expected));

  WeightTable t{grid, params, {}, {}, checksum};
  t.s_hat.resize(grid.size(), 6);
  t.a_scalar.resize(grid.size());
  for (Eigen::Index idx = 0; idx < grid.size(); ++idx)
    for (int c = 0; c < 6; ++c) t.s_hat(idx, c) = r.get_f64();
  r.get_f64_span({t.a_scalar.data(), std::size_t(t.a_scalar.size())});
  if (table_checksum(t) != checksum)
    throw FormatError("weight table " + path.string() + ": checksum mismatch");
  return t;
}

WeightTable load_table(const std::filesystem::path& path, const GridSpec& grid,
                       const KernelParams& params) {
  WeightTable t = load_table(path);
  if (!(t.grid == grid)) {
    std::ostringstream msg;
    msg << "weight table " << path.string() << ": grid mismatch (file N = " << t.grid.n()
        << ", L = " << t.grid.half_length() << "; expected N = " << grid.n()
        << ", L = " << grid.half_length() << ")";
    throw FormatError(msg.str());
  }
  if (!(t.params == params)) {
    std::ostringstream msg;
    msg << "weight table " << path.string() << ": kernel mismatch (file lambda = "
        << t.params.lambda << ", R = " << t.params.trunc_radius
        << ", quad_points = " << t.params.quad_points << ")";
    throw FormatError(msg.str());
  }
  return t;
}

}  // namespace fpl
