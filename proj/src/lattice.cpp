#include "fpl/lattice.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "fpl/fft.hpp"

namespace fpl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kResidueTolerance = 1e-10;

// One c2c transform per grid size, shared by every caller and serialized.
class TransformCache {
 public:
  template <typename Fn>
  void with(int n, Fn&& fn) {
    std::unique_lock lock(mutex_);
    auto& slot = plans_[n];
    if (!slot) slot = std::make_unique<fft::ComplexFft3d>(n);
    fn(*slot);
  }

 private:
  std::mutex mutex_;
  std::map<int, std::unique_ptr<fft::ComplexFft3d>> plans_;
};

TransformCache& transform_cache() {
  static TransformCache cache;
  return cache;
}

// (-1)^k e^{-i pi k / N}: the shift from DFT indices to cell-centered
// velocities v_n = -L + (n + 1/2) dv.
std::vector<std::complex<double>> axis_phases(const GridSpec& g) {
  std::vector<std::complex<double>> p(g.n());
  for (int m = 0; m < g.n(); ++m) {
    const int k = g.mode(m);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    p[m] = sign * std::polar(1.0, -kPi * k / g.n());
  }
  return p;
}

double transform_scale(const GridSpec& g) {
  return std::pow(2.0 * kPi, -1.5) * g.cell_volume();
}

void require_finite(const Eigen::ArrayXd& values, const char* what) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      std::ostringstream msg;
      msg << what << ": non-finite value at index " << i;
      throw InvalidArgument(msg.str());
    }
  }
}

void require_finite(const Eigen::ArrayXcd& values, const char* what) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
      std::ostringstream msg;
      msg << what << ": non-finite coefficient at index " << i;
      throw InvalidArgument(msg.str());
    }
  }
}

}  // namespace

GridSpec::GridSpec(int n_modes, double half_length)
    : n_(n_modes), half_length_(half_length) {
  if (n_modes < 8 || n_modes % 2 != 0)
    throw InvalidArgument("GridSpec: n_modes must be even and >= 8, got " +
                          std::to_string(n_modes));
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw InvalidArgument("GridSpec: half_length must be positive");
}

VelocityField::VelocityField(const GridSpec& g, Eigen::ArrayXd v)
    : grid(g), values(std::move(v)) {
  if (values.size() != g.size())
    throw InvalidArgument("VelocityField: value count does not match grid");
}

GridCoordinates::GridCoordinates(const GridSpec& g) {
  for (auto& axis : v) axis.resize(g.size());
  speed_sq.resize(g.size());
  const int n = g.n();
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2) {
        const auto idx = g.index(i0, i1, i2);
        v[0][idx] = g.node(i0);
        v[1][idx] = g.node(i1);
        v[2][idx] = g.node(i2);
      }
  speed_sq = v[0].square() + v[1].square() + v[2].square();
}

double parseval_constant(const GridSpec& g) { return g.dual_cell_volume(); }

SpectralField forward_transform(const VelocityField& f) {
  require_finite(f.values, "forward_transform");
  const GridSpec& g = f.grid;
  const auto phase = axis_phases(g);
  const double scale = transform_scale(g);
  SpectralField out(g);
  transform_cache().with(g.n(), [&](fft::ComplexFft3d& plan) {
    auto buf = plan.buffer();
    for (Eigen::Index i = 0; i < g.size(); ++i) buf[i] = f.values[i];
    plan.forward();
    const int n = g.n();
    for (int m0 = 0; m0 < n; ++m0)
      for (int m1 = 0; m1 < n; ++m1) {
        const auto p01 = scale * phase[m0] * phase[m1];
        for (int m2 = 0; m2 < n; ++m2) {
          const auto idx = g.index(m0, m1, m2);
          out.coeffs[idx] = buf[idx] * p01 * phase[m2];
        }
      }
  });
  return out;
}

Eigen::ArrayXcd inverse_transform_complex(const SpectralField& F) {
  require_finite(F.coeffs, "inverse_transform");
  const GridSpec& g = F.grid;
  const auto phase = axis_phases(g);
  const double inv = 1.0 / (transform_scale(g) * double(g.size()));
  Eigen::ArrayXcd out(g.size());
  transform_cache().with(g.n(), [&](fft::ComplexFft3d& plan) {
    auto buf = plan.buffer();
    const int n = g.n();
    for (int m0 = 0; m0 < n; ++m0)
      for (int m1 = 0; m1 < n; ++m1) {
        const auto p01 = inv * std::conj(phase[m0] * phase[m1]);
        for (int m2 = 0; m2 < n; ++m2) {
          const auto idx = g.index(m0, m1, m2);
          buf[idx] = F.coeffs[idx] * p01 * std::conj(phase[m2]);
        }
      }
    plan.backward();
    for (Eigen::Index i = 0; i < g.size(); ++i) out[i] = buf[i];
  });
  return out;
}

VelocityField inverse_transform(const SpectralField& F) {
  const Eigen::ArrayXcd z = inverse_transform_complex(F);
  const double re_max = z.real().abs().maxCoeff();
  const double im_max = z.imag().abs().maxCoeff();
  if (im_max > kResidueTolerance * re_max && im_max > 0.0) {
    std::ostringstream msg;
    msg << "inverse_transform: imaginary residue " << im_max
        << " exceeds 1e-10 x max|Re| = " << re_max;
    throw NumericalError(msg.str());
  }
  return VelocityField(F.grid, z.real());
}

SpectralField project_modes(const SpectralField& F, int n_keep) {
  const GridSpec& g = F.grid;
  if (n_keep > g.n() || n_keep < 0)
    throw InvalidArgument("project_modes: n_keep must lie in [0, N], got " +
                          std::to_string(n_keep));
  SpectralField out(g);
  const int n = g.n();
  auto keep = [&](int m) { return 2 * std::abs(g.mode(m)) < n_keep; };
  for (int m0 = 0; m0 < n; ++m0) {
    if (!keep(m0)) continue;
    for (int m1 = 0; m1 < n; ++m1) {
      if (!keep(m1)) continue;
      for (int m2 = 0; m2 < n; ++m2) {
        if (!keep(m2)) continue;
        const auto idx = g.index(m0, m1, m2);
        out.coeffs[idx] = F.coeffs[idx];
      }
    }
  }
  return out;
}

SpectralField spectral_derivative(const SpectralField& F, int axis, int order) {
  if (axis < 0 || axis >= GridSpec::dim)
    throw InvalidArgument("spectral_derivative: axis must be 0, 1 or 2, got " +
                          std::to_string(axis));
  if (order < 1)
    throw InvalidArgument("spectral_derivative: order must be >= 1");
  const GridSpec& g = F.grid;
  const int n = g.n();
  std::vector<std::complex<double>> factor(n);
  for (int m = 0; m < n; ++m) {
    if (order % 2 == 1 && g.is_nyquist(m)) {
      factor[m] = 0.0;
      continue;
    }
    factor[m] = std::pow(std::complex<double>(0.0, g.frequency(m)), order);
  }
  SpectralField out(g);
  for (Eigen::Index idx = 0; idx < g.size(); ++idx) {
    const auto m = g.unravel(idx);
    out.coeffs[idx] = F.coeffs[idx] * factor[m[axis]];
  }
  return out;
}

double quadrature(const VelocityField& f, double weight_exponent) {
  if (weight_exponent == 0.0) return f.values.sum() * f.grid.cell_volume();
  const GridCoordinates c(f.grid);
  const Eigen::ArrayXd w = (1.0 + c.speed_sq).pow(0.5 * weight_exponent);
  return (f.values * w).sum() * f.grid.cell_volume();
}

double inner_product(const VelocityField& f, const VelocityField& g) {
  if (!(f.grid == g.grid)) throw InvalidArgument("inner_product: grid mismatch");
  return (f.values * g.values).sum() * f.grid.cell_volume();
}

double choose_domain(double rho0, double T0, double stretch_C, double dilate_r,
                     double tail_tol, DomainSearch search) {
  if (!(rho0 > 0.0) || !(T0 > 0.0) || !(dilate_r > 0.0))
    throw InvalidArgument("choose_domain: rho0, T0 and dilate_r must be positive");
  if (!(stretch_C >= 1.0))
    throw InvalidArgument("choose_domain: stretch_C must be >= 1");
  if (!(tail_tol > 0.0 && tail_tol < 1.0))
    throw InvalidArgument("choose_domain: tail tolerance must lie in (0, 1)");

  // Per-axis Gaussian integrals with variance T0 / r; the common prefactor
  // C rho0 (2 pi T0)^{-3/2} cancels from the ratio.
  const double sigma = std::sqrt(T0 / dilate_r);
  const double s2 = sigma * sigma;
  const double p_all = sigma * std::sqrt(2.0 * kPi);
  const double q_all = s2 * p_all;

  for (int i = 1; i * search.step <= search.cap + 1e-12; ++i) {
    const double L = i * search.step;
    const double p_out = p_all * std::erfc(L / (sigma * std::sqrt(2.0)));
    const double q_out = s2 * p_out + 2.0 * s2 * L * std::exp(-L * L / (2.0 * s2));
    const double p_in = p_all - p_out;
    const double q_in = q_all - q_out;
    const double inside = p_in * p_in * p_in + 3.0 * q_in * p_in * p_in;
    const double outside = p_out * (p_all * p_all + p_all * p_in + p_in * p_in) +
                           3.0 * (q_out * p_all * p_all + q_in * p_out * (p_all + p_in));
    if (outside <= tail_tol * inside) return L;
  }
  std::ostringstream msg;
  msg << "choose_domain: tail tolerance " << tail_tol
      << " needs a half-length above the cap " << search.cap;
  throw InvalidArgument(msg.str());
}

}  // namespace fpl
