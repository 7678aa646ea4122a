#include "fpl/dynamics.hpp"

#include <cmath>
#include <string>

namespace fpl {

void SolverConfig::validate() const {
  if (n_modes < 8 || n_modes % 2 != 0)
    throw InvalidArgument("n_modes must be even and >= 8");
  if (!(half_length > 0.0)) throw InvalidArgument("half_length must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final))
    throw InvalidArgument("t_final must be finite and >= 0");
  if (!std::isfinite(dt)) throw InvalidArgument("dt must be finite");
  if (!(epsilon_stability > 0.0 && epsilon_stability <= 0.25))
    throw InvalidArgument("epsilon_stability must lie in (0, 0.25]");
  if (output_stride < 1) throw InvalidArgument("output_stride must be >= 1");
  cutoff.validate();
  kernel().validate();
}

GridSpec SolverConfig::grid() const { return GridSpec(n_modes, half_length); }

KernelParams SolverConfig::kernel() const {
  return {lambda, trunc_radius > 0.0 ? trunc_radius : 0.5 * half_length, quad_points};
}

double default_time_step(const GridSpec& grid, const KernelParams& kernel, const VelocityField& g0) {
  const double m0 = weighted_moment(g0, 0.0);
  if (!(m0 > 0.0)) throw InvalidArgument("default_time_step: initial data has zero mass");
  const double xi = grid.dual_spacing() * (grid.n() / 2 - 1);
  const double a_max = std::pow(std::max(1.0, kernel.trunc_radius), kernel.lambda + 2.0) * m0;
  return 2.5 / (a_max * 3.0 * xi * xi);
}

VelocityField rk4_step(const VelocityField& g, double dt, const RhsFunction& f,
                       const VelocityField* k1_in) {
  auto checked = [](VelocityField k, int stage) {
    if (!k.values.allFinite())
      throw NumericalError("RK4 stage " + std::to_string(stage) +
                           " is not finite (dt too large?)");
    return k;
  };
  const GridSpec& grid = g.grid;
  const VelocityField k1 = k1_in ? *k1_in : checked(f(g), 1);
  const VelocityField k2 = checked(f(VelocityField(grid, g.values + 0.5 * dt * k1.values)), 2);
  const VelocityField k3 = checked(f(VelocityField(grid, g.values + 0.5 * dt * k2.values)), 3);
  const VelocityField k4 = checked(f(VelocityField(grid, g.values + dt * k3.values)), 4);
  return VelocityField(grid, (dt / 6.0) * (k1.values + 2.0 * (k2.values + k3.values) + k4.values));
}

Solver::Solver(const SolverConfig& cfg, std::shared_ptr<const WeightTable> table)
    : cfg_(cfg),
      grid_((cfg.validate(), cfg.grid())),
      table_(std::move(table)),
      ws_(table_, cfg.padding),
      cons_(build_conservation(grid_)) {
  if (!(table_->grid == grid_)) throw InvalidArgument("Solver: weight table grid mismatch");
  if (!(table_->params == cfg_.kernel()))
    throw InvalidArgument("Solver: weight table kernel mismatch");
}

VelocityField Solver::evaluate(const VelocityField& g) {
  if (custom_rhs_) return custom_rhs_(g);
  return rhs(g);
}

VelocityField Solver::rhs(const VelocityField& g) {
  const VelocityField q = q_unconserved(g, cfg_.cutoff, ws_);
  tail_norm_ = ws_.last_tail_norm();
  VelocityField p = project(cons_, q);
  correction_norm_ = distance(q, p);
  return p;
}

SolverState Solver::step_rk4(const SolverState& state, double dt) {
  const VelocityField inc = rk4_step(state.g, dt, [this](const VelocityField& x) { return evaluate(x); });
  return {state.t + dt, VelocityField(grid_, state.g.values + project(cons_, inc).values),
          state.step_index + 1, state.diagnostics};
}

SolverState Solver::run(const VelocityField& g0, const DiagnosticsSink& sink,
                         const StateObserver& observer) {
  if (!(g0.grid == grid_)) throw InvalidArgument("Solver::run: initial data grid mismatch");
  if (!g0.values.allFinite()) throw InvalidArgument("Solver::run: initial data not finite");
  const double dt_target = cfg_.dt > 0.0 ? cfg_.dt : default_time_step(grid_, cfg_.kernel(), g0);
  const std::int64_t n_steps =
      cfg_.t_final == 0.0 ? 0 : std::int64_t(std::ceil(cfg_.t_final / dt_target - 1e-9));
  const double dt = n_steps > 0 ? cfg_.t_final / double(n_steps) : 0.0;
  const VelocityField eq = maxwellian_field(equilibrium_of(g0), grid_);

  SolverState state{0.0, g0, 0, {}};
  auto observe = [&](bool emit) {
    // Full records only when emitted; the stability check runs every step.
    const auto record = [&] {
      const double corr = custom_rhs_ ? 0.0 : correction_norm_;
      const double tail = custom_rhs_ ? 0.0 : tail_norm_;
      state.diagnostics = make_record(state.g, state.t, state.step_index, eq, corr, tail,
                                      cfg_.diagnostics);
      if (sink) sink(state.diagnostics);
    };
    if (emit) record();
    const double ratio = emit ? state.diagnostics.neg_ratio : stability_ratio(state.g);
    if (ratio > cfg_.epsilon_stability) {
      if (!emit) record();
      throw StabilityHalt(state.t, ratio, cfg_.epsilon_stability);
    }
    if (observer) observer(state);
  };

  for (std::int64_t n = 0;; ++n) {
    const VelocityField k1 = evaluate(state.g);
    if (!k1.values.allFinite()) throw NumericalError("RK4 stage 1 is not finite (dt too large?)");
    const bool last = n == n_steps;
    observe(last || n % cfg_.output_stride == 0);
    if (last) break;
    const VelocityField inc = rk4_step(state.g, dt, [this](const VelocityField& x) { return evaluate(x); }, &k1);
    state.g = VelocityField(grid_, state.g.values + project(cons_, inc).values);
    state.step_index = n + 1;
    state.t = n + 1 == n_steps ? cfg_.t_final : double(n + 1) * dt;
  }
  return state;
}

}  // namespace fpl
