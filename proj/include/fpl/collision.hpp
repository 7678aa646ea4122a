#pragma once

#include <Eigen/Core>

#include <memory>
#include <vector>

#include "fpl/lattice.hpp"
#include "fpl/weights.hpp"

namespace fpl {

namespace fft {
class ComplexFft3d;
class BandedRealFft3d;
}  // namespace fft

/// Cut-off applied to g before the collision operator. Identity is the
/// production default; smoothstep is 1 on (1 - delta) Omega, 0 outside
/// (1 - delta / 5) Omega, with a C^2 quintic ramp per axis in between.
struct CutoffFunction {
  enum class Mode { identity, smoothstep };
  Mode mode = Mode::identity;
  double delta_chi = 0.2;

  void validate() const;
  double operator()(double v0, double v1, double v2, double half_length) const;
  VelocityField apply(const VelocityField& g) const;
};

/// Scratch state for collision evaluations on one grid. Single-user; the
/// weight table is shared read-only.
class CollisionWorkspace {
 public:
  /// With padding the mode convolution runs on a 3N/2 lattice (rounded up to
  /// even), which keeps every retained output mode free of aliasing; without
  /// it indices wrap circularly on the N lattice.
  explicit CollisionWorkspace(std::shared_ptr<const WeightTable> table, bool padding = true);
  ~CollisionWorkspace();
  CollisionWorkspace(const CollisionWorkspace&) = delete;
  CollisionWorkspace& operator=(const CollisionWorkspace&) = delete;

  const GridSpec& grid() const { return table_->grid; }
  const WeightTable& table() const { return *table_; }
  bool padding() const { return padding_; }
  int lattice() const { return m_; }

  /// sqrt(parseval * sum |Q^|^2) over lattice modes outside the retained set,
  /// from the most recent q_hat call. High modes may alias onto each other.
  double last_tail_norm() const { return tail_norm_; }

 private:
  friend SpectralField q_hat(const SpectralField& F, CollisionWorkspace& ws);

  SpectralField q_hat_real(const SpectralField& F);
  SpectralField q_hat_complex(const SpectralField& F);
  void scaled_inputs(const SpectralField& F);

  std::shared_ptr<const WeightTable> table_;
  bool padding_;
  int m_;
  double tail_norm_ = 0.0;

  // Retained input modes (no Nyquist component) and their positions on the
  // convolution lattice.
  std::vector<Eigen::Index> retained_;
  std::vector<Eigen::Index> full_slot_;
  std::vector<Eigen::Index> half_slot_;  // -1 when the mode lives in the conjugate half
  std::vector<Eigen::Index> mirror_;     // N-lattice index of -k

  // The 14 spectral factors: f, a f, then (eta_i eta_j f, S_ij f) per pair.
  std::vector<Eigen::ArrayXcd> factors_;
  std::unique_ptr<fft::BandedRealFft3d> real_plan_;
  std::vector<char> kept_half_;
  std::unique_ptr<fft::ComplexFft3d> complex_plan_;
  Eigen::ArrayXcd complex_tmp_, complex_acc_;
};

/// Q^(xi_k) = dxi^3 sum_m f^(k - m) f^(m) [w_m^T S^(w_m) w_m - eta^T S^(w_m) eta],
/// eta = xi_{k-m}, evaluated as 1 + 6 plain convolutions. Nyquist input
/// coefficients are ignored and the output is zero on Nyquist planes.
/// Hermitian input takes a real-transform path, anything else a complex one.
SpectralField q_hat(const SpectralField& F, CollisionWorkspace& ws);

/// inverse_transform(project_modes(q_hat(forward_transform(chi g)))).
VelocityField q_unconserved(const VelocityField& g, const CutoffFunction& chi,
                            CollisionWorkspace& ws);

/// a_bar = S * g (six upper-triangle components) and c_bar = c * g with
/// c(z) = -2 (lambda + 3) |z|^lambda, both truncated to |z| < R and summed
/// directly over the grid. O(N^6); N <= 16.
///
/// Truncating S adds a single layer 2 R^{lambda+1} on the sphere |z| = R to
/// its double divergence; c_layer is that layer integrated against the
/// trigonometric interpolant of g. The full coefficient is c_bar + c_layer.
struct DirectCoefficients {
  Eigen::Array<double, Eigen::Dynamic, 6> a_bar;
  Eigen::ArrayXd c_bar;
  Eigen::ArrayXd c_layer;
};
DirectCoefficients direct_coefficients(const VelocityField& g, const KernelParams& params);

/// a_bar_ij d_ij g - (c_bar + c_layer) g with the second derivatives taken
/// spectrally.
/// N <= 16.
VelocityField q_direct_oracle(const VelocityField& g, const KernelParams& params);

}  // namespace fpl
