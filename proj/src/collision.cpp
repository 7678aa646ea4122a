#include "fpl/collision.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fpl/fft.hpp"

namespace fpl {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr int kOracleMaxN = 16;

// Quintic smoothstep: C^2, 0 at x <= 0, 1 at x >= 1.
double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

int wrap(int k, int m) { return ((k % m) + m) % m; }

}  // namespace

void CutoffFunction::validate() const {
  if (mode == Mode::smoothstep && !(delta_chi > 0.0 && delta_chi < 0.5))
    throw InvalidArgument("CutoffFunction: delta_chi must lie in (0, 1/2)");
}

double CutoffFunction::operator()(double v0, double v1, double v2, double half_length) const {
  if (mode == Mode::identity) return 1.0;
  const double inner = (1.0 - delta_chi) * half_length;
  const double outer = (1.0 - delta_chi / 5.0) * half_length;
  double chi = 1.0;
  for (double v : {v0, v1, v2}) chi *= smoothstep((outer - std::abs(v)) / (outer - inner));
  return chi;
}

VelocityField CutoffFunction::apply(const VelocityField& g) const {
  validate();
  if (mode == Mode::identity) return g;
  const double L = g.grid.half_length();
  const VelocityField chi = VelocityField::sample(
      g.grid, [&](double a, double b, double c) { return (*this)(a, b, c, L); });
  return VelocityField(g.grid, g.values * chi.values);
}

CollisionWorkspace::CollisionWorkspace(std::shared_ptr<const WeightTable> table, bool padding)
    : table_(std::move(table)), padding_(padding) {
  if (!table_) throw InvalidArgument("CollisionWorkspace: null weight table");
  const GridSpec& g = table_->grid;
  const int n = g.n();
  // (3N/2)-lattice: the smallest zero padding for which no product mode
  // aliases onto a retained one.
  m_ = padding_ ? 3 * n / 2 + (3 * n / 2) % 2 : n;
  const int mh = m_ / 2 + 1;

  std::vector<Eigen::Index> position(g.size(), -1);
  for (Eigen::Index idx = 0; idx < g.size(); ++idx) {
    const auto m = g.unravel(idx);
    if (g.is_nyquist(m[0]) || g.is_nyquist(m[1]) || g.is_nyquist(m[2])) continue;
    position[idx] = Eigen::Index(retained_.size());
    retained_.push_back(idx);
    const int p0 = wrap(g.mode(m[0]), m_), p1 = wrap(g.mode(m[1]), m_), p2 = wrap(g.mode(m[2]), m_);
    full_slot_.push_back((Eigen::Index(p0) * m_ + p1) * m_ + p2);
    half_slot_.push_back(g.mode(m[2]) >= 0 ? (Eigen::Index(p0) * m_ + p1) * mh + p2 : -1);
  }
  mirror_.resize(retained_.size());
  for (std::size_t j = 0; j < retained_.size(); ++j) {
    const auto m = g.unravel(retained_[j]);
    const Eigen::Index neg = g.index(wrap(-g.mode(m[0]), n), wrap(-g.mode(m[1]), n),
                                     wrap(-g.mode(m[2]), n));
    mirror_[j] = position[neg];
  }
  factors_.assign(14, Eigen::ArrayXcd(Eigen::Index(retained_.size())));
}

CollisionWorkspace::~CollisionWorkspace() = default;

void CollisionWorkspace::scaled_inputs(const SpectralField& F) {
  const GridSpec& g = grid();
  const WeightTable& t = *table_;
  for (std::size_t j = 0; j < retained_.size(); ++j) {
    const Eigen::Index idx = retained_[j];
    const auto m = g.unravel(idx);
    const double eta[3] = {g.frequency(m[0]), g.frequency(m[1]), g.frequency(m[2])};
    const std::complex<double> f = F.coeffs[idx];
    factors_[0][j] = f;
    factors_[1][j] = t.a_scalar[idx] * f;
    for (int c = 0; c < 6; ++c) {
      const auto [a, b] = kSymmetricPairs[c];
      factors_[2 + 2 * c][j] = eta[a] * eta[b] * f;
      factors_[3 + 2 * c][j] = t.s_hat(idx, c) * f;
    }
  }
}

namespace {

// Physical-space product U0 W0 - sum_c mult_c D_c S_c, accumulated one
// factor pair at a time. `load(i)` transforms factor i and returns a view of
// the result that stays valid until the next call.
template <typename Array, typename Load>
void accumulate_products(Array& tmp, Array& acc, Load&& load) {
  tmp = load(0);
  acc = tmp * load(1);
  for (int c = 0; c < 6; ++c) {
    const double mult = kSymmetricPairs[c].first == kSymmetricPairs[c].second ? 1.0 : 2.0;
    tmp = load(2 + 2 * c);
    acc -= mult * tmp * load(3 + 2 * c);
  }
}

}  // namespace

SpectralField CollisionWorkspace::q_hat_real(const SpectralField& F) {
  const GridSpec& g = grid();
  if (!real_plan_) {
    real_plan_ = std::make_unique<fft::BandedRealFft3d>(m_, g.n() / 2);
    kept_half_.assign(real_plan_->half().size(), 0);
    for (const Eigen::Index h : half_slot_)
      if (h >= 0) kept_half_[h] = 1;
  }
  auto& plan = *real_plan_;
  const auto half = plan.half();
  scaled_inputs(F);

  const Eigen::Index size = Eigen::Index(m_) * m_ * m_;
  auto load = [&](int i, int slot) {
    plan.clear();
    const auto& fac = factors_[i];
    for (std::size_t j = 0; j < retained_.size(); ++j)
      if (half_slot_[j] >= 0) half[half_slot_[j]] = fac[j];
    plan.to_real(slot);
  };
  Eigen::Map<const Eigen::ArrayXd> x(plan.real(0).data(), size), y(plan.real(1).data(), size);
  Eigen::Map<Eigen::ArrayXd> acc(plan.real(2).data(), size);
  load(0, 0);
  load(1, 1);
  acc = x * y;
  for (int c = 0; c < 6; ++c) {
    const double mult = kSymmetricPairs[c].first == kSymmetricPairs[c].second ? 1.0 : 2.0;
    load(2 + 2 * c, 0);
    load(3 + 2 * c, 1);
    acc -= mult * x * y;
  }
  plan.to_spectral(2);

  const double m3 = double(m_) * m_ * m_;
  const double scale = g.dual_cell_volume() / m3;
  SpectralField out(g);
  for (std::size_t j = 0; j < retained_.size(); ++j) {
    if (half_slot_[j] >= 0) {
      out.coeffs[retained_[j]] = scale * half[half_slot_[j]];
    } else {
      out.coeffs[retained_[j]] = std::conj(scale * half[half_slot_[mirror_[j]]]);
    }
  }
  const int mh = plan.half_extent();
  double tail = 0.0;
  for (std::size_t h = 0; h < half.size(); ++h) {
    if (kept_half_[h]) continue;
    const int p2 = int(h % mh);
    const double w = (p2 == 0 || 2 * p2 == m_) ? 1.0 : 2.0;
    tail += w * std::norm(scale * half[h]);
  }
  tail_norm_ = std::sqrt(g.dual_cell_volume() * tail);
  return out;
}

SpectralField CollisionWorkspace::q_hat_complex(const SpectralField& F) {
  const GridSpec& g = grid();
  if (!complex_plan_) {
    complex_plan_ = std::make_unique<fft::ComplexFft3d>(m_);
    complex_tmp_.resize(Eigen::Index(m_) * m_ * m_);
    complex_acc_.resize(complex_tmp_.size());
  }
  auto& plan = *complex_plan_;
  const auto buf = plan.buffer();
  scaled_inputs(F);

  auto load = [&](int i) {
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0));
    const auto& fac = factors_[i];
    for (std::size_t j = 0; j < retained_.size(); ++j) buf[full_slot_[j]] = fac[j];
    plan.backward();
    return Eigen::Map<const Eigen::ArrayXcd>(buf.data(), Eigen::Index(buf.size()));
  };
  accumulate_products(complex_tmp_, complex_acc_, load);

  std::copy(complex_acc_.begin(), complex_acc_.end(), buf.begin());
  plan.forward();

  const double m3 = double(m_) * m_ * m_;
  const double scale = g.dual_cell_volume() / m3;
  SpectralField out(g);
  std::vector<char> kept(buf.size(), 0);
  for (std::size_t j = 0; j < retained_.size(); ++j) {
    out.coeffs[retained_[j]] = scale * buf[full_slot_[j]];
    kept[full_slot_[j]] = 1;
  }
  double tail = 0.0;
  for (std::size_t h = 0; h < buf.size(); ++h)
    if (!kept[h]) tail += std::norm(scale * buf[h]);
  tail_norm_ = std::sqrt(g.dual_cell_volume() * tail);
  return out;
}

SpectralField q_hat(const SpectralField& F, CollisionWorkspace& ws) {
  if (!(F.grid == ws.grid())) {
    std::ostringstream msg;
    msg << "q_hat: field grid (N = " << F.grid.n() << ", L = " << F.grid.half_length()
        << ") does not match workspace grid (N = " << ws.grid().n()
        << ", L = " << ws.grid().half_length() << ")";
    throw InvalidArgument(msg.str());
  }
  double peak = 0.0, asym = 0.0;
  for (std::size_t j = 0; j < ws.retained_.size(); ++j) {
    const auto f = F.coeffs[ws.retained_[j]];
    const auto fm = F.coeffs[ws.retained_[ws.mirror_[j]]];
    peak = std::max(peak, std::abs(f));
    asym = std::max(asym, std::abs(f - std::conj(fm)));
  }
  if (!std::isfinite(peak) || !std::isfinite(asym))
    throw InvalidArgument("q_hat: non-finite input coefficients");
  return asym <= kHermitianTol * peak ? ws.q_hat_real(F) : ws.q_hat_complex(F);
}

VelocityField q_unconserved(const VelocityField& g, const CutoffFunction& chi,
                            CollisionWorkspace& ws) {
  const SpectralField Q = q_hat(forward_transform(chi.apply(g)), ws);
  return inverse_transform(project_modes(Q, g.grid.n()));
}

DirectCoefficients direct_coefficients(const VelocityField& g, const KernelParams& params) {
  params.validate();
  const GridSpec& grid = g.grid;
  if (grid.n() > kOracleMaxN)
    throw InvalidArgument("direct collision oracle: N = " + std::to_string(grid.n()) +
                          " exceeds the limit of 16");
  const GridCoordinates x(grid);
  const double R2 = params.trunc_radius * params.trunc_radius;
  const double lam = params.lambda;
  const double dv3 = grid.cell_volume();
  DirectCoefficients out{Eigen::Array<double, Eigen::Dynamic, 6>::Zero(grid.size(), 6),
                         Eigen::ArrayXd::Zero(grid.size()), Eigen::ArrayXd::Zero(grid.size())};
  for (Eigen::Index p = 0; p < grid.size(); ++p) {
    double a[6] = {0, 0, 0, 0, 0, 0};
    double c = 0.0;
    for (Eigen::Index q = 0; q < grid.size(); ++q) {
      const double gq = g.values[q];
      if (gq == 0.0) continue;
      const double z[3] = {x.v[0][p] - x.v[0][q], x.v[1][p] - x.v[1][q], x.v[2][p] - x.v[2][q]};
      const double r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
      if (r2 >= R2) continue;
      // pow(0, 0) = 1 gives c(0) = -6 at lambda = 0.
      c += -2.0 * (lam + 3.0) * std::pow(r2, 0.5 * lam) * gq;
      if (r2 == 0.0) continue;
      const double rl = std::pow(r2, 0.5 * lam);
      for (int k = 0; k < 6; ++k) {
        const auto [i, j] = kSymmetricPairs[k];
        a[k] += rl * ((i == j ? r2 : 0.0) - z[i] * z[j]) * gq;
      }
    }
    for (int k = 0; k < 6; ++k) out.a_bar(p, k) = a[k] * dv3;
    out.c_bar[p] = c * dv3;
  }

  // The truncated kernel's double divergence carries a single layer
  // 2 R^{lambda+1} delta(|z| - R). Its convolution with the trigonometric
  // interpolant of g is exact: the sphere measure transforms to 4 pi R^2 j0(|xi| R).
  const double R = params.trunc_radius;
  SpectralField G = project_modes(forward_transform(g), grid.n());
  for (Eigen::Index idx = 0; idx < grid.size(); ++idx) {
    const auto m = grid.unravel(idx);
    const double xi = std::sqrt(std::pow(grid.frequency(m[0]), 2) + std::pow(grid.frequency(m[1]), 2) +
                                std::pow(grid.frequency(m[2]), 2));
    const double t = xi * R;
    const double j0 = t < 1e-8 ? 1.0 : std::sin(t) / t;
    G.coeffs[idx] *= 2.0 * std::pow(R, lam + 1.0) * 4.0 * std::numbers::pi * R * R * j0;
  }
  out.c_layer = inverse_transform(G).values;
  return out;
}

VelocityField q_direct_oracle(const VelocityField& g, const KernelParams& params) {
  const DirectCoefficients d = direct_coefficients(g, params);
  const SpectralField G = project_modes(forward_transform(g), g.grid.n());
  Eigen::ArrayXd q = -(d.c_bar + d.c_layer) * g.values;
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kSymmetricPairs[k];
    const SpectralField D = i == j ? spectral_derivative(G, i, 2)
                                   : spectral_derivative(spectral_derivative(G, i, 1), j, 1);
    const double mult = i == j ? 1.0 : 2.0;
    q += mult * d.a_bar.col(k) * inverse_transform(D).values;
  }
  return VelocityField(g.grid, q);
}

}  // namespace fpl
