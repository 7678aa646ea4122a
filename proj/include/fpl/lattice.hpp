#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "fpl/error.hpp"

namespace fpl {

/// Geometry of the truncated velocity cube (-L, L)^3 sampled at N cell
/// centers per axis, and of its dual Fourier lattice xi_k = (pi / L) k with
/// k in {-N/2, ..., N/2 - 1}.
///
/// Linear indices are row-major with axis 0 slowest:
/// idx = (i0 * N + i1) * N + i2.
class GridSpec {
 public:
  static constexpr int dim = 3;

  GridSpec(int n_modes, double half_length);

  int n() const { return n_; }
  double half_length() const { return half_length_; }
  double dv() const { return 2.0 * half_length_ / n_; }
  double cell_volume() const { return dv() * dv() * dv(); }
  double dual_spacing() const { return std::numbers::pi / half_length_; }
  double dual_cell_volume() const {
    const double h = dual_spacing();
    return h * h * h;
  }
  Eigen::Index size() const { return Eigen::Index(n_) * n_ * n_; }

  /// Cell-center coordinate of grid index i along any axis.
  double node(int i) const { return -half_length_ + (i + 0.5) * dv(); }

  /// Signed mode number stored at DFT index m.
  int mode(int m) const { return m < n_ / 2 ? m : m - n_; }
  /// Frequency of DFT index m.
  double frequency(int m) const { return dual_spacing() * mode(m); }
  bool is_nyquist(int m) const { return m == n_ / 2; }

  Eigen::Index index(int i0, int i1, int i2) const {
    return (Eigen::Index(i0) * n_ + i1) * n_ + i2;
  }
  std::array<int, 3> unravel(Eigen::Index idx) const {
    const int i2 = int(idx % n_);
    const int i1 = int((idx / n_) % n_);
    const int i0 = int(idx / (Eigen::Index(n_) * n_));
    return {i0, i1, i2};
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int n_;
  double half_length_;
};

/// Real samples of a distribution on the cell centers of a grid.
struct VelocityField {
  GridSpec grid;
  Eigen::ArrayXd values;

  explicit VelocityField(const GridSpec& g) : grid(g), values(Eigen::ArrayXd::Zero(g.size())) {}
  VelocityField(const GridSpec& g, Eigen::ArrayXd v);

  /// Samples fn(v0, v1, v2) on every cell center.
  template <typename Fn>
  static VelocityField sample(const GridSpec& g, Fn&& fn) {
    VelocityField f(g);
    const int n = g.n();
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
          f.values[g.index(i0, i1, i2)] = fn(g.node(i0), g.node(i1), g.node(i2));
    return f;
  }
};

/// Fourier coefficients f^(xi_k) on the dual lattice, stored at DFT indices
/// with the same row-major layout as VelocityField.
struct SpectralField {
  GridSpec grid;
  Eigen::ArrayXcd coeffs;

  explicit SpectralField(const GridSpec& g)
      : grid(g), coeffs(Eigen::ArrayXcd::Zero(g.size())) {}
};

/// The collision invariants and weight <v>^k sampled on the grid.
struct GridCoordinates {
  std::array<Eigen::ArrayXd, 3> v;  // v_j at each cell
  Eigen::ArrayXd speed_sq;          // |v|^2
  explicit GridCoordinates(const GridSpec& g);
};

/// f^(xi) = (2 pi)^{-3/2} int f(v) e^{-i xi.v} dv, discretized with the
/// midpoint rule. Parseval: ||f||^2 = parseval_constant * sum |f^_k|^2.
SpectralField forward_transform(const VelocityField& f);

/// Exact inverse of forward_transform. Throws NumericalError if the result
/// carries an imaginary part above 1e-10 of its max-abs value.
VelocityField inverse_transform(const SpectralField& F);

/// Inverse transform without the real-residue check; the imaginary part is
/// returned alongside.
Eigen::ArrayXcd inverse_transform_complex(const SpectralField& F);

double parseval_constant(const GridSpec& g);

/// Zeroes every coefficient with some |k_i| >= n_keep / 2.
SpectralField project_modes(const SpectralField& F, int n_keep);

/// Multiplies each coefficient by (i xi_axis)^order. Odd orders drop the
/// axis Nyquist plane, which has no real derivative.
SpectralField spectral_derivative(const SpectralField& F, int axis, int order);

/// sum_n f_n <v_n>^k dv^3 with <v> = sqrt(1 + |v|^2).
double quadrature(const VelocityField& f, double weight_exponent);

/// Midpoint inner product sum_n f_n g_n dv^3.
double inner_product(const VelocityField& f, const VelocityField& g);

struct DomainSearch {
  double step = 0.25;
  double cap = 64.0;
};

/// Smallest L on the search grid for which the bounding Gaussian
/// C rho0 (2 pi T0)^{-3/2} exp(-r |v|^2 / (2 T0)) has <v>^2-weighted mass
/// outside (-L, L)^3 at most tail_tol times its mass inside.
double choose_domain(double rho0, double T0, double stretch_C, double dilate_r,
                     double tail_tol, DomainSearch search = {});

}  // namespace fpl
