#include "fpl/conserve.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace fpl {

namespace {

constexpr double kMaxCondition = 1e14;

void require_grid(const ConservationOperator& op, const VelocityField& q, const char* what) {
  if (!(op.grid == q.grid)) throw InvalidArgument(std::string(what) + ": grid mismatch");
}

std::array<Eigen::ArrayXd, 5> invariants(const GridSpec& grid) {
  const GridCoordinates x(grid);
  return {Eigen::ArrayXd::Ones(grid.size()), x.v[0], x.v[1], x.v[2], x.speed_sq};
}

}  // namespace

Vector5d ConservationOperator::apply(const Eigen::ArrayXd& q) const {
  Vector5d r;
  for (int k = 0; k < 5; ++k) r[k] = (a_rows[k] * q).sum();
  return r;
}

Eigen::ArrayXd ConservationOperator::apply_transpose(const Vector5d& c) const {
  Eigen::ArrayXd out = c[0] * a_rows[0];
  for (int k = 1; k < 5; ++k) out += c[k] * a_rows[k];
  return out;
}

ConservationOperator build_conservation(const GridSpec& grid) {
  ConservationOperator op{grid, invariants(grid), {}, {}, 0.0};
  const double w = grid.cell_volume();
  for (auto& row : op.a_rows) row *= w;
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j) op.gram(i, j) = op.gram(j, i) = (op.a_rows[i] * op.a_rows[j]).sum();

  const Eigen::SelfAdjointEigenSolver<Matrix5d> eig(op.gram, Eigen::EigenvaluesOnly);
  const auto ev = eig.eigenvalues();
  op.condition = ev[0] > 0.0 ? ev[4] / ev[0] : INFINITY;
  if (!(op.condition < kMaxCondition)) {
    std::ostringstream msg;
    msg << "build_conservation: Gram matrix numerically singular (condition " << op.condition << ")";
    throw NumericalError(msg.str());
  }
  op.gram_factor.compute(op.gram);
  const Matrix5d L = op.gram_factor.matrixL();
  if ((L * L.transpose() - op.gram).norm() > 1e-12 * op.gram.norm())
    throw NumericalError("build_conservation: Cholesky residual above 1e-12");
  return op;
}

VelocityField project(const ConservationOperator& op, const VelocityField& q) {
  require_grid(op, q, "project");
  Eigen::ArrayXd out = q.values - op.apply_transpose(op.gram_factor.solve(op.apply(q.values)));
  // One refinement pass removes the rounding left by the first solve.
  out -= op.apply_transpose(op.gram_factor.solve(op.apply(out)));
  return VelocityField(op.grid, std::move(out));
}

Vector5d invariant_moments(const VelocityField& q) {
  const auto phi = invariants(q.grid);
  Vector5d m;
  for (int k = 0; k < 5; ++k) m[k] = (phi[k] * q.values).sum() * q.grid.cell_volume();
  return m;
}

GammaCorrection gamma_correction(const ConservationOperator& op, const VelocityField& q) {
  require_grid(op, q, "gamma_correction");
  const auto phi = invariants(op.grid);
  const double w = op.grid.cell_volume();
  Matrix5d G;
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j) G(i, j) = G(j, i) = (phi[i] * phi[j]).sum() * w;
  const Eigen::LLT<Matrix5d> factor(G);

  auto correction = [&](const Vector5d& beta) {
    Eigen::ArrayXd c = beta[0] * phi[0];
    for (int k = 1; k < 5; ++k) c += beta[k] * phi[k];
    return c;
  };
  Vector5d beta = factor.solve(invariant_moments(q));
  Eigen::ArrayXd out = q.values - correction(beta);
  const Vector5d refine = factor.solve(invariant_moments(VelocityField(op.grid, out)));
  out -= correction(refine);
  beta += refine;
  return {2.0 * beta, VelocityField(op.grid, std::move(out))};
}

double correction_norm(const ConservationOperator& op, const VelocityField& q) {
  const VelocityField p = project(op, q);
  const VelocityField diff(op.grid, q.values - p.values);
  return std::sqrt(inner_product(diff, diff));
}

}  // namespace fpl
