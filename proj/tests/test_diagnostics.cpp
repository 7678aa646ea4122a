#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fpl/diagnostics.hpp"
#include "test_support.hpp"

using namespace fpl;
using fpl::testing::random_field;

namespace {

constexpr double kPi = std::numbers::pi;

// Per-axis midpoint sums of x^p exp(-(x - c)^2 / (2T)); the 3-D moments of a
// Maxwellian factor into products of these.
double axis_sum(const GridSpec& g, int p, double c, double T) {
  double s = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    const double x = g.node(i);
    s += std::pow(x, p) * std::exp(-(x - c) * (x - c) / (2.0 * T));
  }
  return s * g.dv() / std::sqrt(2.0 * kPi * T);
}

}  // namespace

TEST_CASE("moments of a discretized Maxwellian") {
  const GridSpec g(32, 6.0);
  const Moments m = moments(maxwellian_field({1.0, {0, 0, 0}, 1.0}, g));
  CHECK(!m.degenerate);
  CHECK(std::abs(m.rho - 1.0) <= 1e-6);
  for (double v : m.V) CHECK(std::abs(v) <= 1e-9);
  CHECK(std::abs(m.T - 1.0) <= 1e-5);
  CHECK(m.T_raw == doctest::Approx(m.T).epsilon(1e-12));

  // Separable oracle: rho = s0^3, 3 rho T = 3 s0^2 s2.
  const double s0 = axis_sum(g, 0, 0.0, 1.0), s2 = axis_sum(g, 2, 0.0, 1.0);
  CHECK(m.rho == doctest::Approx(s0 * s0 * s0).epsilon(1e-13));
  CHECK(m.T == doctest::Approx(s2 / s0).epsilon(1e-12));
}

TEST_CASE("moments of a shifted Maxwellian") {
  const GridSpec g(32, 6.0);
  const Moments m = moments(maxwellian_field({1.0, {0.5, 0, 0}, 1.0}, g));
  CHECK(std::abs(m.V[0] - 0.5) <= 1e-6);
  CHECK(std::abs(m.V[1]) <= 1e-9);
  CHECK(std::abs(m.V[2]) <= 1e-9);
  CHECK(std::abs(m.T - 1.0) <= 1e-5);
  const double s0 = axis_sum(g, 0, 0.5, 1.0), s1 = axis_sum(g, 1, 0.5, 1.0);
  CHECK(m.V[0] == doctest::Approx(s1 / s0).epsilon(1e-12));
  // Raw temperature includes the bulk kinetic energy.
  CHECK(m.T_raw == doctest::Approx(m.T + m.V[0] * m.V[0] / 3.0).epsilon(1e-12));
}

TEST_CASE("degenerate density is flagged") {
  const GridSpec g(8, 3.0);
  const Moments zero = moments(VelocityField(g));
  CHECK(zero.rho == 0.0);
  CHECK(zero.degenerate);
  CHECK(moments(VelocityField(g, Eigen::ArrayXd::Constant(g.size(), -1.0))).degenerate);
  CHECK_THROWS_AS(equilibrium_of(VelocityField(g)), NumericalError);
}

TEST_CASE("equilibrium of a field matches its invariants") {
  const GridSpec g(16, 5.0);
  const VelocityField f = maxwellian_field({2.0, {0.3, -0.2, 0.1}, 0.8}, g);
  const MaxwellianSpec eq = equilibrium_of(f);
  CHECK(eq.rho0 == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(eq.V0[0] == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(eq.V0[1] == doctest::Approx(-0.2).epsilon(1e-6));
  CHECK(eq.T0 == doctest::Approx(0.8).epsilon(1e-5));
}

TEST_CASE("weighted moments") {
  const GridSpec g(32, 6.0);
  const VelocityField M = maxwellian_field({1.0, {0, 0, 0}, 1.0}, g);
  CHECK(std::abs(weighted_moment(M, 0.0) - 1.0) <= 1e-6);
  // int <v>^2 M = rho (1 + 3 T).
  CHECK(std::abs(weighted_moment(M, 2.0) - 4.0) <= 1e-5);
  const VelocityField r = random_field(g, 3);
  const double m0 = weighted_moment(r, 0.0);
  double prev = m0;
  for (double k : {0.5, 1.0, 2.0, 3.0, 4.5}) {
    const double mk = weighted_moment(r, k);
    CHECK(mk >= m0);
    CHECK(mk >= prev);
    prev = mk;
  }
  CHECK(m0 == doctest::Approx(r.values.abs().sum() * g.cell_volume()).epsilon(1e-14));
}

TEST_CASE("Maxwellian samples") {
  const GridSpec g(32, 6.0);
  const VelocityField M = maxwellian_field({1.0, {0, 0, 0}, 1.0}, g);
  const double h = 0.5 * g.dv();
  const double peak = std::pow(2.0 * kPi, -1.5) * std::exp(-3.0 * h * h / 2.0);
  CHECK(M.values.maxCoeff() == doctest::Approx(peak).epsilon(1e-14));
  CHECK(std::abs(M.values.maxCoeff() - std::pow(2.0 * kPi, -1.5)) <= 0.06 * std::pow(2.0 * kPi, -1.5));
  const VelocityField M2 = maxwellian_field({2.0, {0, 0, 0}, 1.0}, g);
  CHECK(((M2.values - 2.0 * M.values).abs() == 0.0).all());
  CHECK_THROWS_AS(maxwellian_field({0.0, {0, 0, 0}, 1.0}, g), InvalidArgument);
  CHECK_THROWS_AS(maxwellian_field({1.0, {0, 0, 0}, -1.0}, g), InvalidArgument);
}

TEST_CASE("entropy") {
  const GridSpec g(32, 6.0);
  const VelocityField M = maxwellian_field({1.0, {0, 0, 0}, 1.0}, g);
  CHECK(std::abs(entropy(M) - (std::log(std::pow(2.0 * kPi, -1.5)) - 1.5)) <= 1e-5);
  for (double alpha : {2.0, 0.3}) {
    const double rho = M.values.sum() * g.cell_volume();
    const double expected = alpha * entropy(M) + alpha * std::log(alpha) * rho;
    CHECK(entropy(VelocityField(g, alpha * M.values)) == doctest::Approx(expected).epsilon(1e-12));
  }
  VelocityField neg = M;
  neg.values[0] = -1.0;
  neg.values[1] = 1e-31;
  const double dropped = M.values[0] * std::log(M.values[0]) + M.values[1] * std::log(M.values[1]);
  CHECK(entropy(neg) == doctest::Approx(entropy(M) - dropped * g.cell_volume()).epsilon(1e-13));
  CHECK(entropy(VelocityField(g)) == 0.0);
}

TEST_CASE("stability ratio") {
  const GridSpec g(8, 3.0);
  const VelocityField M = maxwellian_field({1.0, {0, 0, 0}, 1.0}, g);
  CHECK(stability_ratio(M) == 0.0);

  VelocityField f = M;
  const Eigen::Index c = 100;
  const double delta = 1e-3;
  f.values[c] = -delta;
  // Two-term quotient: the flipped cell against all the others.
  const GridCoordinates x(g);
  const double w_c = 1.0 + x.speed_sq[c];
  double pos = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (i != c) pos += M.values[i] * (1.0 + x.speed_sq[i]);
  CHECK(stability_ratio(f) == doctest::Approx(delta * w_c / pos).epsilon(1e-13));
  CHECK(stability_ratio(VelocityField(g, 3.7 * f.values)) == doctest::Approx(stability_ratio(f)).epsilon(1e-14));
  CHECK(std::isinf(stability_ratio(VelocityField(g, -M.values))));
}

TEST_CASE("Sobolev norms") {
  SUBCASE("s = 0 is the L2 norm") {
    const GridSpec g(8, 3.0);
    const VelocityField r = random_field(g, 5);
    CHECK(hs_norm(r, 0) == l2_norm(r));
    CHECK(hs_norm(r, 0, 2.0) == l2_weighted(r, 2.0));
  }
  SUBCASE("single mode") {
    const GridSpec g(16, 3.0);
    const double xi = kPi / g.half_length();
    const VelocityField f = VelocityField::sample(g, [&](double a, double, double) { return std::cos(xi * a); });
    const double l2 = l2_norm(f);
    CHECK(hs_norm(f, 1) * hs_norm(f, 1) == doctest::Approx((1.0 + xi * xi) * l2 * l2).epsilon(1e-12));
    CHECK(hs_norm(f, 2) * hs_norm(f, 2) ==
          doctest::Approx((1.0 + xi * xi + std::pow(xi, 4)) * l2 * l2).epsilon(1e-12));
  }
  SUBCASE("Gaussian closed forms and resolution stability") {
    // ||M||^2 = (4 pi)^{-3/2}; |grad M|^2 and second derivatives integrate
    // against M^2, a Gaussian of variance 1/2.
    const double base = std::pow(4.0 * kPi, -1.5);
    const double h1 = std::sqrt(base * 2.5), h2 = std::sqrt(base * 5.5);
    double prev1 = 0.0, prev2 = 0.0;
    for (int n : {16, 32}) {
      const GridSpec g(n, 6.0);
      const VelocityField M = maxwellian_field({1.0, {0, 0, 0}, 1.0}, g);
      const double a = hs_norm(M, 1), b = hs_norm(M, 2);
      CHECK(a == doctest::Approx(h1).epsilon(1e-3));
      CHECK(b == doctest::Approx(h2).epsilon(1e-2));
      if (prev1 > 0.0) {
        CHECK(a == doctest::Approx(prev1).epsilon(1e-2));
        CHECK(b == doctest::Approx(prev2).epsilon(1e-2));
      }
      prev1 = a;
      prev2 = b;
    }
  }
  SUBCASE("weighted derivative norm") {
    const GridSpec g(16, 3.0);
    const double xi = kPi / g.half_length();
    const VelocityField f = VelocityField::sample(g, [&](double a, double, double) { return std::sin(xi * a); });
    const GridCoordinates x(g);
    // d/dv1 sin = xi cos, weighted by <v>^2.
    const Eigen::ArrayXd w = 1.0 + x.speed_sq;
    const Eigen::ArrayXd d = xi * x.v[0].unaryExpr([&](double a) { return std::cos(xi * a); });
    const double expected = ((f.values * w).square().sum() + (d * w).square().sum()) * g.cell_volume();
    CHECK(hs_norm(f, 1, 2.0) == doctest::Approx(std::sqrt(expected)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(hs_norm(VelocityField(GridSpec(8, 1.0)), -1), InvalidArgument);
}

TEST_CASE("norms are homogeneous of degree one") {
  const GridSpec g(16, 4.0);
  const VelocityField f = random_field(g, 11);
  const VelocityField f3(g, 3.0 * f.values);
  CHECK(l2_norm(f3) == doctest::Approx(3.0 * l2_norm(f)).epsilon(1e-14));
  CHECK(l2_weighted(f3, 2.0) == doctest::Approx(3.0 * l2_weighted(f, 2.0)).epsilon(1e-14));
  CHECK(weighted_moment(f3, 3.0) == doctest::Approx(3.0 * weighted_moment(f, 3.0)).epsilon(1e-14));
  CHECK(hs_norm(f3, 1) == doctest::Approx(3.0 * hs_norm(f, 1)).epsilon(1e-13));
  CHECK(hs_norm(f3, 2, 1.0) == doctest::Approx(3.0 * hs_norm(f, 2, 1.0)).epsilon(1e-13));
  CHECK(distance(f3, VelocityField(g)) == doctest::Approx(3.0 * l2_norm(f)).epsilon(1e-14));
  CHECK(distance(f, f) <= 1e-13);
  CHECK_THROWS_AS(distance(f, VelocityField(GridSpec(8, 4.0))), InvalidArgument);
}

TEST_CASE("Fourier tail bound") {
  const GridSpec g(32, 6.0);
  SUBCASE("retained single mode has no tail") {
    const double xi = 2.0 * kPi / g.half_length();
    const VelocityField f = VelocityField::sample(g, [&](double a, double b, double) {
      return std::cos(xi * a) * std::cos(0.5 * xi * b);
    });
    const TailBound t = tail_bound_check(f, 2, 6);
    CHECK(t.lhs <= 1e-13 * l2_norm(f));
    CHECK(tail_bound_check(f, 2, 4).lhs == doctest::Approx(l2_norm(f)).epsilon(1e-12));
  }
  SUBCASE("Gaussian") {
    const VelocityField M = maxwellian_field({1.0, {0, 0, 0}, 1.0}, g);
    const TailBound half = tail_bound_check(M, 2, g.n() / 2);
    CHECK(half.lhs < half.rhs);
    double prev = INFINITY;
    for (int n_keep = 2; n_keep <= g.n(); n_keep += 2) {
      const TailBound t = tail_bound_check(M, 2, n_keep);
      CHECK(t.lhs <= prev);
      CHECK(t.empirical_constant() <= 4.0 * (1.0 + 1e-12));
      // Independent tail: the field minus its reconstruction from kept modes.
      const VelocityField kept = inverse_transform(project_modes(forward_transform(M), n_keep));
      CHECK(std::abs(t.lhs - distance(M, kept)) <= 1e-12 * l2_norm(M));
      const double Mc = n_keep / 2;
      CHECK(t.rhs == doctest::Approx(std::pow(2.0 * kPi, -1.5) * std::pow(6.0 / (2.0 * kPi * Mc), 2) *
                                     hs_norm(M, 2)).epsilon(1e-14));
      prev = t.lhs;
    }
  }
  CHECK_THROWS_AS(tail_bound_check(VelocityField(g), 2, 3), InvalidArgument);
}

TEST_CASE("diagnostics record") {
  const GridSpec g(16, 5.0);
  const VelocityField M = maxwellian_field({1.0, {0.2, 0, 0}, 1.0}, g);
  const VelocityField eq = maxwellian_field(equilibrium_of(M), g);
  const DiagnosticsRecord r = make_record(M, 1.5, 7, eq, 1e-9, 2e-9, {5.0, 2.0});
  const auto names = DiagnosticsRecord::names();
  const auto values = r.values();
  REQUIRE(names.size() == values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    INFO(names[i]);
    CHECK(std::isfinite(values[i]));
  }
  CHECK(r.t == 1.5);
  CHECK(r.step == 7);
  CHECK(r.m0 <= r.m2);
  CHECK(r.m2 <= r.m3);
  CHECK(r.m3 <= r.m_kmax);
  CHECK(r.m_kmax == doctest::Approx(weighted_moment(M, 5.0)).epsilon(1e-15));
  CHECK(r.dist_to_eq < 1e-3);
  CHECK(r.neg_ratio == 0.0);
  CHECK(r.mass == doctest::Approx(r.mom.rho).epsilon(1e-15));
  CHECK(r.correction_norm == 1e-9);
  CHECK(r.tail_norm == 2e-9);
}
