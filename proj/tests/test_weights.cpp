#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fpl/binary_io.hpp"
#include "fpl/weights.hpp"

using namespace fpl;

namespace {

constexpr double kPi = std::numbers::pi;
const double kNorm = std::pow(2.0 * kPi, -1.5);

struct Rule {
  std::vector<double> x, w;
};

// Gauss-Legendre nodes on [a, b] by Newton iteration on the three-term recurrence.
Rule gauss_legendre(int n, double a, double b) {
  Rule r{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = 0.5 * (a + b) + 0.5 * (b - a) * z;
    r.w[i] = (b - a) / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

// Full 3-D spherical quadrature of (2 pi)^{-3/2} int_{|u|<R} S(u) cos(w.u) du.
Eigen::Matrix3d sphere_oracle(const KernelParams& p, const Eigen::Vector3d& w) {
  const int panels = 8;
  std::vector<double> rx, rw;
  for (int i = 0; i < panels; ++i) {
    const auto seg = gauss_legendre(24, p.trunc_radius * i / panels, p.trunc_radius * (i + 1) / panels);
    rx.insert(rx.end(), seg.x.begin(), seg.x.end());
    rw.insert(rw.end(), seg.w.begin(), seg.w.end());
  }
  const Rule mu = gauss_legendre(48, -1.0, 1.0);
  const int nphi = 64;
  Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
  for (std::size_t a = 0; a < mu.x.size(); ++a) {
    const double st = std::sqrt(1.0 - mu.x[a] * mu.x[a]);
    for (int b = 0; b < nphi; ++b) {
      const double phi = 2.0 * kPi * b / nphi;
      const Eigen::Vector3d u(st * std::cos(phi), st * std::sin(phi), mu.x[a]);
      const Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - u * u.transpose();
      const double proj_u = w.dot(u);
      double radial = 0.0;
      for (std::size_t c = 0; c < rx.size(); ++c)
        radial += rw[c] * std::pow(rx[c], p.lambda + 4.0) * std::cos(proj_u * rx[c]);
      acc += mu.w[a] * (2.0 * kPi / nphi) * radial * proj;
    }
  }
  return kNorm * acc;
}

// (2 pi)^{-3/2} 4 pi int_0^R r^{lambda+4} sin(rho r)/(rho r) dr by composite Simpson.
double trace_oracle(const KernelParams& p, double rho) {
  const int n = 20000;
  const double h = p.trunc_radius / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = i * h;
    const double t = rho * r;
    const double f = std::pow(r, p.lambda + 4.0) * (t == 0.0 ? 1.0 : std::sin(t) / t);
    s += f * ((i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return kNorm * 4.0 * kPi * s * h / 3.0;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fpl_test_weights_" + name);
}

}  // namespace

TEST_CASE("profile at the origin matches the closed form") {
  const KernelParams p{0.0, 1.0, 256};
  const auto prof = radial_profiles(p, 0.0);
  CHECK(prof.A == doctest::Approx(kNorm * 8.0 * kPi / 15.0).epsilon(1e-14));
  CHECK(prof.B == 0.0);

  // Just off the origin the quadrature agrees with the limit.
  const auto near = radial_profiles(p, 1e-6);
  CHECK(near.A == doctest::Approx(prof.A).epsilon(1e-10));
  CHECK(std::abs(near.B) < 1e-12);
}

TEST_CASE("trace identity against an independent radial integral") {
  for (double lambda : {0.0, 0.5, 1.0}) {
    const KernelParams p{lambda, 2.5, 256};
    for (double rho : {0.0, 0.3, 1.7, 6.0, 25.0}) {
      const auto prof = radial_profiles(p, rho);
      const double oracle = trace_oracle(p, rho);
      const double scale = radial_profiles(p, 0.0).A;
      CHECK(std::abs(radial_power_transform(p, rho) - oracle) < 1e-9 * scale);
      CHECK(std::abs(3.0 * prof.A + prof.B - 2.0 * oracle) < 1e-9 * scale);
    }
  }
}

TEST_CASE("profiles decay with frequency") {
  const KernelParams p{1.0, 2.0, 256};
  const double a0 = radial_profiles(p, 0.0).A;
  double prev_env = a0;
  for (double rho : {5.0, 20.0, 80.0}) {
    const auto prof = radial_profiles(p, rho);
    const double env = std::max(std::abs(prof.A), std::abs(prof.B));
    CHECK(env < prev_env);
    prev_env = env;
  }
}

TEST_CASE("tensor agrees with a full three-dimensional quadrature") {
  for (double lambda : {0.0, 1.0}) {
    const KernelParams p{lambda, 1.5, 256};
    const double scale = radial_profiles(p, 0.0).A;
    for (const Eigen::Vector3d w : {Eigen::Vector3d(0.0, 0.0, 0.0), Eigen::Vector3d(0.4, -1.1, 2.0),
                                    Eigen::Vector3d(3.0, 0.5, 0.0), Eigen::Vector3d(-2.2, 2.2, 2.2)}) {
      const double rho = w.norm();
      const auto prof = radial_profiles(p, rho);
      Eigen::Matrix3d s = prof.A * Eigen::Matrix3d::Identity();
      if (rho > 0) s += prof.B * w * w.transpose() / (rho * rho);
      const Eigen::Matrix3d oracle = sphere_oracle(p, w);
      CHECK((s - oracle).cwiseAbs().maxCoeff() < 1e-6 * scale);
    }
  }
}

TEST_CASE("table entries are symmetric, isotropic and reproduce the profiles") {
  const GridSpec g(8, 2.0);
  const KernelParams p{1.0, 2.0, 256};
  const auto t = build_table(g, p);
  REQUIRE(t.s_hat.rows() == g.size());
  const double scale = radial_profiles(p, 0.0).A;
  for (Eigen::Index idx = 0; idx < g.size(); ++idx) {
    const auto m = g.unravel(idx);
    const Eigen::Vector3d w(g.frequency(m[0]), g.frequency(m[1]), g.frequency(m[2]));
    const Eigen::Matrix3d s = t.matrix(idx);
    CHECK((s - s.transpose()).cwiseAbs().maxCoeff() == 0.0);
    // Rotating w by a coordinate permutation permutes the tensor.
    const Eigen::Index swapped = g.index(m[1], m[0], m[2]);
    const Eigen::Matrix3d s2 = t.matrix(swapped);
    CHECK(std::abs(s(0, 0) - s2(1, 1)) < 1e-12 * scale);
    CHECK(std::abs(s(0, 2) - s2(1, 2)) < 1e-12 * scale);
    CHECK(t.a_scalar[idx] == doctest::Approx(w.dot(s * w)).epsilon(1e-14).scale(scale));
  }
  // A spot check of one entry against the independent 3-D quadrature.
  const Eigen::Index idx = g.index(1, 7, 2);
  const auto m = g.unravel(idx);
  const Eigen::Vector3d w(g.frequency(m[0]), g.frequency(m[1]), g.frequency(m[2]));
  CHECK((t.matrix(idx) - sphere_oracle(p, w)).cwiseAbs().maxCoeff() < 1e-6 * scale);
}

TEST_CASE("table construction is deterministic") {
  const GridSpec g(8, 3.0);
  const KernelParams p{0.5, 3.0, 256};
  const auto a = build_table(g, p);
  const auto b = build_table(g, p);
  CHECK((a.s_hat == b.s_hat).all());
  CHECK((a.a_scalar == b.a_scalar).all());
  CHECK(a.checksum == b.checksum);
  CHECK(a.checksum == table_checksum(a));
}

TEST_CASE("save and load round-trip bit-exactly") {
  const GridSpec g(8, 2.0);
  const KernelParams p{1.0, 2.0, 256};
  const auto t = build_table(g, p);
  const auto path = temp_path("roundtrip.bin");
  save_table(t, path);
  CHECK(std::filesystem::file_size(path) == 64 + 7 * 8 * std::uintmax_t(g.size()));
  const auto back = load_table(path, g, p);
  CHECK((back.s_hat == t.s_hat).all());
  CHECK((back.a_scalar == t.a_scalar).all());
  CHECK(back.checksum == t.checksum);
  CHECK(back.grid == g);
  CHECK(back.params == p);

  SUBCASE("mismatched grid is rejected") {
    CHECK_THROWS_AS(load_table(path, GridSpec(16, 2.0), p), FormatError);
    CHECK_THROWS_WITH_AS(load_table(path, GridSpec(8, 2.5), p), doctest::Contains("grid mismatch"),
                         FormatError);
    KernelParams other = p;
    other.lambda = 0.5;
    CHECK_THROWS_AS(load_table(path, g, other), FormatError);
  }
  SUBCASE("truncated payload reports both lengths") {
    std::string bytes = read_file(path);
    bytes.resize(bytes.size() - 40);
    const auto cut = temp_path("truncated.bin");
    write_file_atomic(cut, bytes);
    const std::string expected = std::to_string(7 * 8 * g.size());
    const std::string actual = std::to_string(7 * 8 * g.size() - 40);
    CHECK_THROWS_WITH_AS(load_table(cut), doctest::Contains(expected.c_str()), FormatError);
    CHECK_THROWS_WITH_AS(load_table(cut), doctest::Contains(actual.c_str()), FormatError);
    std::filesystem::remove(cut);
  }
  SUBCASE("corrupted payload fails the checksum") {
    std::string bytes = read_file(path);
    bytes[100] ^= 0x5a;
    const auto bad = temp_path("corrupt.bin");
    write_file_atomic(bad, bytes);
    CHECK_THROWS_WITH_AS(load_table(bad), doctest::Contains("checksum"), FormatError);
    std::filesystem::remove(bad);
  }
  SUBCASE("truncated header") {
    const auto bad = temp_path("header.bin");
    write_file_atomic(bad, read_file(path).substr(0, 20));
    CHECK_THROWS_AS(load_table(bad), FormatError);
    std::filesystem::remove(bad);
  }
  std::filesystem::remove(path);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(radial_profiles({-3.0, 1.0, 256}, 1.0), InvalidArgument);
  CHECK_THROWS_WITH(radial_profiles({-3.0, 1.0, 256}, 1.0), doctest::Contains("soft potentials"));
  CHECK_THROWS_AS(radial_profiles({1.5, 1.0, 256}, 1.0), InvalidArgument);
  CHECK_THROWS_AS(radial_profiles({1.0, 0.0, 256}, 1.0), InvalidArgument);
  CHECK_THROWS_AS(radial_profiles({1.0, 1.0, 256}, -1.0), InvalidArgument);
  CHECK_THROWS_AS(build_table(GridSpec(8, 1.0), {1.0, -2.0, 256}), InvalidArgument);
}
