#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "fpl/collision.hpp"
#include "fpl/conserve.hpp"
#include "fpl/diagnostics.hpp"
#include "fpl/weights.hpp"

namespace fpl {

struct SolverConfig {
  double lambda = 1.0;
  int n_modes = 32;
  double half_length = 6.0;
  double trunc_radius = 0.0;  // <= 0 selects half the half length
  int quad_points = 256;
  double dt = 0.0;            // <= 0 selects default_time_step
  double t_final = 1.0;
  CutoffFunction cutoff;
  bool padding = true;
  double epsilon_stability = 0.25;
  std::int64_t output_stride = 1;
  std::uint64_t rng_seed = 0;
  DiagnosticsOptions diagnostics;

  void validate() const;
  GridSpec grid() const;
  KernelParams kernel() const;
};

/// 2.5 / (max(1, R)^{lambda+2} m_0(g0) |xi|_max^2): the diffusion matrix is
/// bounded by R^{lambda+2} m_0 and RK4 is stable on [-2.78, 0].
double default_time_step(const GridSpec& grid, const KernelParams& kernel, const VelocityField& g0);

struct SolverState {
  double t = 0.0;
  VelocityField g;
  std::int64_t step_index = 0;
  DiagnosticsRecord diagnostics;
};

using RhsFunction = std::function<VelocityField(const VelocityField&)>;
using DiagnosticsSink = std::function<void(const DiagnosticsRecord&)>;
using StateObserver = std::function<void(const SolverState&)>;

/// One classical RK4 step of dg/dt = f(g). k1 may be supplied when already
/// known. A non-finite stage raises NumericalError naming the stage.
VelocityField rk4_step(const VelocityField& g, double dt, const RhsFunction& f,
                       const VelocityField* k1 = nullptr);

/// Time integrator for dg/dt = Lambda Q_u(g, g) on one grid.
class Solver {
 public:
  Solver(const SolverConfig& cfg, std::shared_ptr<const WeightTable> table);

  const SolverConfig& config() const { return cfg_; }
  const GridSpec& grid() const { return grid_; }
  const ConservationOperator& conservation() const { return cons_; }
  CollisionWorkspace& workspace() { return ws_; }

  /// Replaces the collision right side (test harnesses).
  void set_rhs(RhsFunction f) { custom_rhs_ = std::move(f); }

  /// project(q_unconserved(g)); records the correction and tail norms.
  VelocityField rhs(const VelocityField& g);
  double last_correction_norm() const { return correction_norm_; }
  double last_tail_norm() const { return tail_norm_; }

  /// Advances by dt; the increment is projected once more so the invariants
  /// carry only roundoff.
  SolverState step_rk4(const SolverState& state, double dt);

  /// Integrates to t_final with n = ceil(t_final / dt) equal steps. Emits a
  /// record at step 0, every output_stride steps and at the last step.
  /// Throws StabilityHalt, after emitting the offending record, when the
  /// stability ratio exceeds epsilon_stability (including at t = 0).
  /// `observer` sees every accepted state, the initial one included.
  SolverState run(const VelocityField& g0, const DiagnosticsSink& sink,
                  const StateObserver& observer = {});

 private:
  VelocityField evaluate(const VelocityField& g);

  SolverConfig cfg_;
  GridSpec grid_;
  std::shared_ptr<const WeightTable> table_;
  CollisionWorkspace ws_;
  ConservationOperator cons_;
  RhsFunction custom_rhs_;
  double correction_norm_ = 0.0;
  double tail_norm_ = 0.0;
};

}  // namespace fpl
