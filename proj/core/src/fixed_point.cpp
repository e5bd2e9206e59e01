#include <cmath>
#include <ostream>

#include "sfs/error.hpp"
#include "sfs/solver.hpp"
#include "solver_common.hpp"

namespace sfs {

namespace {

// Frozen-coefficient normal equations:
//   (2 mu 1_prior + grad^T W grad) z = 2 mu 1_prior z0 + grad^T sum_c lambda a^c (I^c - b^c)
// with W = lambda sum_c a^c a^c^T evaluated at the current gradient.
void assemble(const ScalarField& z, const ModelInputs& in, const SolverConfig& config,
              GradientQuadratic& op, std::vector<double>& rhs, double& max_a) {
  const GridPtr& grid = z.grid;
  const std::size_t n = grid->size();
  const double lambda = config.weights.lambda;
  const double mu = config.weights.mu;

  const VectorField theta = gradient(z);
  const PdeCoefficients coeffs = pde_coefficients(theta, in.geom, in.albedo, in.lighting);

  std::fill(op.wxx().begin(), op.wxx().end(), 0.0);
  std::fill(op.wxy().begin(), op.wxy().end(), 0.0);
  std::fill(op.wyy().begin(), op.wyy().end(), 0.0);
  std::fill(op.mass().begin(), op.mass().end(), 0.0);

  VectorField v(grid);
  max_a = 0.0;
  for (std::size_t c = 0; c < coeffs.a.size(); ++c) {
    const VectorField& a = coeffs.a[c];
    const ScalarField& b = coeffs.b[c];
    const ScalarField& intensity = in.image.channels[c];
    for (std::size_t i = 0; i < n; ++i) {
      const double ax = a.x[i];
      const double ay = a.y[i];
      max_a = std::max(max_a, std::max(std::abs(ax), std::abs(ay)));
      op.wxx()[i] += lambda * ax * ax;
      op.wxy()[i] += lambda * ax * ay;
      op.wyy()[i] += lambda * ay * ay;
      const double r = intensity[i] - b[i];
      v.x[i] += lambda * ax * r;
      v.y[i] += lambda * ay * r;
    }
  }

  ScalarField d = divergence(v);
  rhs.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -d[i];

  if (mu > 0.0 && in.prior) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!in.prior->defined[i]) continue;
      op.mass()[i] = 2.0 * mu;
      rhs[i] += 2.0 * mu * in.prior->z0[i];
    }
  }
}

}  // namespace

SolveResult solve_fixed_point(const ModelInputs& in, const ScalarField& z0,
                              const SolverConfig& config, std::ostream* log) {
  config.validate();
  if (!(config.weights.lambda > 0.0)) {
    throw Error(ErrorCode::ConfigError, "the fixed-point baseline needs lambda > 0");
  }
  detail::check_inputs(in, z0, config.weights);

  SolverState state = initial_state(z0, in, config);
  const bool has_prior = config.weights.mu > 0.0 && in.prior && in.prior->count() > 0;
  if (log) *log << "# k energy primal dual beta inner_mean cg_iterations\n";

  GradientQuadratic op(z0.grid);
  std::vector<double> rhs;
  StopReason reason = StopReason::MaxIterations;

  for (int k = 0; k < config.max_iterations; ++k) {
    double max_a = 0.0;
    assemble(state.z, in, config, op, rhs, max_a);
    if (k == 0 && !(max_a > 1e-14)) {
      throw Error(ErrorCode::DegenerateLinearization,
                  "frozen a^c vanish everywhere; the linearized energy does not depend on z");
    }

    const CgResult cg = conjugate_gradient(op, rhs, state.z.values, config.cg);
    if (!has_prior && config.gauge_fix) detail::anchor_mean(state.z.values, state.gauge_mean);
    for (double v : state.z.values) {
      if (!std::isfinite(v)) throw Error(ErrorCode::SolverDiverged, "fixed point produced NaN");
    }

    state.theta = gradient(state.z);
    const double energy = feasible_objective(state.z, config.weights, in);
    state.energy_history.push_back(energy);
    state.k = k + 1;
    state.diagnostics.cg_iterations.push_back(cg.iterations);
    if (!cg.converged) state.diagnostics.cg_not_converged = true;

    IterationRecord rec{state.k, energy, 0.0, 0.0, 0.0, 0.0, cg.iterations};
    state.diagnostics.iterations.push_back(rec);
    if (log) detail::write_log_line(*log, rec);

    const double previous = state.energy_history[state.energy_history.size() - 2];
    if (detail::relative_change_below(previous, energy, config.tolerance)) {
      reason = StopReason::RelativeEnergy;
      break;
    }
  }
  return detail::finish(std::move(state), in, reason);
}

}  // namespace sfs
