#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <array>

#include "fpl/lattice.hpp"

namespace fpl {

using Vector5d = Eigen::Matrix<double, 5, 1>;
using Matrix5d = Eigen::Matrix<double, 5, 5>;

/// Constraint matrix A with rows (phi_k)_n dv^3 for the collision invariants
/// phi = 1, v1, v2, v3, |v|^2, and the Cholesky factor of A A^T.
struct ConservationOperator {
  GridSpec grid;
  std::array<Eigen::ArrayXd, 5> a_rows;
  Matrix5d gram;
  Eigen::LLT<Matrix5d> gram_factor;
  double condition = 0.0;

  /// A q: the five discrete moments scaled by dv^3.
  Vector5d apply(const Eigen::ArrayXd& q) const;
  /// A^T c.
  Eigen::ArrayXd apply_transpose(const Vector5d& c) const;
};

ConservationOperator build_conservation(const GridSpec& grid);

/// Lambda(A) q = q - A^T (A A^T)^{-1} A q, applied through the 5x5 factor.
VelocityField project(const ConservationOperator& op, const VelocityField& q);

/// The same projection written as q - (g1 + g2 v1 + g3 v2 + g4 v3 + g5 |v|^2) / 2
/// with the multipliers solved in the moment basis.
struct GammaCorrection {
  Vector5d gammas;
  VelocityField corrected;
};
GammaCorrection gamma_correction(const ConservationOperator& op, const VelocityField& q);

/// ||q - project(q)||_2.
double correction_norm(const ConservationOperator& op, const VelocityField& q);

/// Discrete moments sum_n phi_k(v_n) q_n dv^3 for the five invariants.
Vector5d invariant_moments(const VelocityField& q);

}  // namespace fpl
