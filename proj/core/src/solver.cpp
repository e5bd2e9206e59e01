#include "sfs/solver.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <ostream>
#include <string>

#include "sfs/error.hpp"
#include "solver_common.hpp"
#include "summation.hpp"

namespace sfs {

void SolverConfig::validate() const {
  weights.validate();
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::ConfigError, std::string(name) + " must be > 0");
    }
  };
  positive(beta0, "beta0");
  positive(tolerance, "tolerance");
  positive(newton.gradient_tolerance, "newton gradient tolerance");
  positive(cg.relative_tolerance, "cg tolerance");
  if (!(newton.armijo > 0.0 && newton.armijo < 1.0)) {
    throw Error(ErrorCode::ConfigError, "armijo constant must lie in (0, 1)");
  }
  if (!(newton.backtrack > 0.0 && newton.backtrack < 1.0)) {
    throw Error(ErrorCode::ConfigError, "backtracking factor must lie in (0, 1)");
  }
  if (!(penalty.tau > 1.0)) throw Error(ErrorCode::ConfigError, "tau must be > 1");
  if (!(penalty.ratio > 1.0)) throw Error(ErrorCode::ConfigError, "ratio must be > 1");
  if (max_iterations < 0 || newton.max_iterations < 0 || cg.max_iterations < 0) {
    throw Error(ErrorCode::ConfigError, "iteration caps must be >= 0");
  }
}

ModelInputs make_inputs(GridPtr grid, const CameraModel& camera, Image image, Albedo albedo,
                        Lighting lighting, std::optional<PriorData> prior) {
  ModelInputs in;
  in.geom = pixel_geometry(camera, grid);
  in.grid = std::move(grid);
  in.camera = camera;
  in.image = std::move(image);
  in.albedo = std::move(albedo);
  in.lighting = std::move(lighting);
  in.prior = std::move(prior);
  return in;
}

double feasible_objective(const ScalarField& z, const Weights& w, const ModelInputs& in) {
  return model_objective(gradient(z), z, w, in);
}

double theta_curvature_scale(const ModelInputs& in, const Weights& weights) {
  double scale = weights.nu;
  if (weights.lambda > 0.0) {
    for (std::size_t c = 0; c < in.lighting.num_channels(); ++c) {
      const ScalarField& rho = in.albedo.channels[c];
      detail::NeumaierSum rho_sq;
      for (double r : rho.values) rho_sq += r * r;
      const double mean_rho_sq = rho.size() ? rho_sq.value() / rho.size() : 0.0;
      scale += 2.0 * weights.lambda * mean_rho_sq * in.lighting.channels[c].head<3>().squaredNorm();
    }
  }
  return scale > 0.0 ? scale : 1.0;
}

double initial_beta(const SolverConfig& config, const ModelInputs& in) {
  const double f = in.camera.is_perspective() ? in.camera.focal : 1.0;
  return config.beta0 * f * f * theta_curvature_scale(in, config.weights);
}

SolverState initial_state(const ScalarField& z0, const ModelInputs& in,
                          const SolverConfig& config) {
  SolverState s;
  s.z = z0;
  s.theta = gradient(z0);
  s.psi = VectorField(z0.grid);
  s.beta = initial_beta(config, in);
  s.k = 0;
  s.gauge_mean = detail::mean(z0.values);
  s.energy_history.push_back(feasible_objective(z0, config.weights, in));
  return s;
}

VectorField theta_update(const SolverState& state, const ModelInputs& in,
                         const SolverConfig& config, ThetaUpdateStats* stats) {
  const auto& grid = *state.z.grid;
  const std::size_t n = grid.size();
  const Weights& w = config.weights;
  VectorField gz = gradient(state.z);
  VectorField out(state.z.grid);

  // Pure proximal step: closed form.
  if (w.lambda == 0.0 && w.nu == 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      out.x[i] = gz.x[i] + state.psi.x[i] / state.beta;
      out.y[i] = gz.y[i] + state.psi.y[i] / state.beta;
    }
    if (stats) *stats = {};
    return out;
  }

  const std::size_t channels = w.lambda > 0.0 ? in.lighting.num_channels() : 0;
  std::vector<double> rho(channels), intensity(channels);
  PixelContext ctx;
  ctx.lighting = std::span<const ShVector>(in.lighting.channels.data(), channels);
  ctx.rho = rho;
  ctx.intensity = intensity;
  ctx.lambda = w.lambda;
  ctx.nu = w.nu;
  ctx.beta = state.beta;

  const NewtonSettings& ns = config.newton;
  std::size_t total_inner = 0;
  std::size_t floor_hits = 0;

  for (std::size_t i = 0; i < n; ++i) {
    ctx.g = {gz.x[i], gz.y[i]};
    ctx.psi = {state.psi.x[i], state.psi.y[i]};
    ctx.f = in.geom.f[i];
    ctx.xt = in.geom.xt[i];
    ctx.yt = in.geom.yt[i];
    for (std::size_t c = 0; c < channels; ++c) {
      rho[c] = in.albedo.channels[c][i];
      intensity[c] = in.image.channels[c][i];
    }

    Eigen::Vector2d theta(state.theta.x[i], state.theta.y[i]);
    PixelEvaluation cur = pixel_objective(theta, ctx);
    if (!std::isfinite(cur.value)) {
      throw Error(ErrorCode::SolverDiverged, "non-finite pixel objective at (" +
                                                 std::to_string(grid.x(i)) + ", " +
                                                 std::to_string(grid.y(i)) + ")");
    }
    const double start_value = cur.value;

    int it = 0;
    for (; it < ns.max_iterations; ++it) {
      if (cur.gradient.norm() <= ns.gradient_tolerance) break;
      Eigen::Vector2d step;
      Eigen::LLT<Eigen::Matrix2d> llt(cur.hessian);
      if (llt.info() == Eigen::Success) {
        step = -llt.solve(cur.gradient);
      } else {
        step = -cur.gradient;
      }
      double slope = cur.gradient.dot(step);
      if (!(slope < 0.0)) {
        step = -cur.gradient;
        slope = -cur.gradient.squaredNorm();
      }

      double t = 1.0;
      bool accepted = false;
      PixelEvaluation trial;
      for (int bt = 0; bt <= ns.max_backtracks; ++bt) {
        trial = pixel_objective(theta + t * step, ctx);
        if (std::isfinite(trial.value) && trial.value <= cur.value + ns.armijo * t * slope) {
          accepted = true;
          break;
        }
        t *= ns.backtrack;
      }
      if (!accepted) break;
      theta += t * step;
      cur = trial;
    }
    total_inner += static_cast<std::size_t>(it);
    if (cur.floored) ++floor_hits;

    if (config.check_descent && !(cur.value <= start_value)) {
      throw Error(ErrorCode::SolverDiverged, "theta update increased the objective at (" +
                                                 std::to_string(grid.x(i)) + ", " +
                                                 std::to_string(grid.y(i)) + ")");
    }
    out.x[i] = theta.x();
    out.y[i] = theta.y();
  }

  if (stats) {
    stats->mean_inner_iterations = static_cast<double>(total_inner) / static_cast<double>(n);
    stats->floor_hits = floor_hits;
  }
  return out;
}

ScalarField z_update(const SolverState& state, const ModelInputs& in, const SolverConfig& config,
                     CgResult* cg) {
  const GridPtr& grid = state.z.grid;
  const std::size_t n = grid->size();
  const double mu = config.weights.mu;
  const bool has_prior = mu > 0.0 && in.prior && in.prior->count() > 0;

  GradientQuadratic op(grid);
  op.set_isotropic(state.beta);

  VectorField v(grid);
  for (std::size_t i = 0; i < n; ++i) {
    v.x[i] = state.beta * state.theta.x[i] - state.psi.x[i];
    v.y[i] = state.beta * state.theta.y[i] - state.psi.y[i];
  }
  ScalarField rhs = divergence(v);
  for (double& r : rhs.values) r = -r;

  if (has_prior) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!in.prior->defined[i]) continue;
      op.mass()[i] = 2.0 * mu;
      rhs[i] += 2.0 * mu * in.prior->z0[i];
    }
  }

  ScalarField z = state.z;
  const CgResult res = conjugate_gradient(op, rhs.values, z.values, config.cg);
  if (cg) *cg = res;

  if (!has_prior && config.gauge_fix) detail::anchor_mean(z.values, state.gauge_mean);
  return z;
}

VectorField dual_update(const SolverState& state) {
  VectorField gz = gradient(state.z);
  VectorField psi(state.z.grid);
  for (std::size_t i = 0; i < gz.size(); ++i) {
    psi.x[i] = state.psi.x[i] + state.beta * (gz.x[i] - state.theta.x[i]);
    psi.y[i] = state.psi.y[i] + state.beta * (gz.y[i] - state.theta.y[i]);
  }
  return psi;
}

double penalty_update(double beta, double primal_residual, double dual_residual,
                      const PenaltySettings& settings) {
  if (!settings.adaptive) return beta;
  if (primal_residual > settings.ratio * dual_residual) return beta * settings.tau;
  if (dual_residual > settings.ratio * primal_residual) return beta / settings.tau;
  return beta;
}

namespace detail {

void check_inputs(const ModelInputs& in, const ScalarField& z0, const Weights& w) {
  if (!in.grid || !z0.grid || z0.grid.get() != in.grid.get()) {
    throw Error(ErrorCode::ConfigError, "initial depth and inputs live on different grids");
  }
  for (double v : z0.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::ConfigError, "initial depth is not finite");
  }
  if (w.lambda > 0.0) {
    const std::size_t c = in.lighting.num_channels();
    if (c == 0) throw Error(ErrorCode::ConfigError, "lambda > 0 requires lighting");
    if (in.albedo.num_channels() != c) {
      throw Error(ErrorCode::ConfigError, "albedo has " +
                                              std::to_string(in.albedo.num_channels()) +
                                              " channels, lighting has " + std::to_string(c));
    }
    if (in.image.num_channels() != c) {
      throw Error(ErrorCode::ConfigError, "image has " +
                                              std::to_string(in.image.num_channels()) +
                                              " channels, lighting has " + std::to_string(c));
    }
    for (const auto& ch : in.image.channels) {
      if (ch.grid.get() != in.grid.get()) {
        throw Error(ErrorCode::ConfigError, "image grid does not match");
      }
    }
    for (const auto& ch : in.albedo.channels) {
      if (ch.grid.get() != in.grid.get()) {
        throw Error(ErrorCode::ConfigError, "albedo grid does not match");
      }
    }
  }
  if (w.mu > 0.0) {
    if (!in.prior) throw Error(ErrorCode::ConfigError, "mu > 0 requires a prior depth");
    if (in.prior->z0.grid.get() != in.grid.get() ||
        in.prior->defined.size() != in.grid->size()) {
      throw Error(ErrorCode::ConfigError, "prior grid does not match");
    }
  }
}

double mean(const std::vector<double>& v) {
  NeumaierSum s;
  for (double x : v) s += x;
  return s.value() / static_cast<double>(v.size());
}

void anchor_mean(std::vector<double>& v, double target) {
  const double shift = target - mean(v);
  for (double& x : v) x += shift;
}

double norm(const VectorField& a) { return std::sqrt(dot(a, a)); }

void write_log_line(std::ostream& os, const IterationRecord& r) {
  os << r.k << ' ' << r.energy << ' ' << r.primal_residual << ' ' << r.dual_residual << ' '
     << r.beta << ' ' << r.mean_inner_iterations << ' ' << r.cg_iterations << '\n';
}

bool relative_change_below(double previous, double current, double tol) {
  return std::abs(current - previous) / std::max(previous, 1e-12) < tol;
}

SolveResult finish(SolverState state, const ModelInputs& in, StopReason reason) {
  SolveResult r;
  r.depth = depth_from_z(in.camera, state.z);
  r.normals = normals_from_gradient(gradient(state.z), in.geom);
  r.state = std::move(state);
  r.reason = reason;
  return r;
}

}  // namespace detail

SolveResult solve(const ModelInputs& in, const ScalarField& z0, const SolverConfig& config,
                  std::ostream* log) {
  config.validate();
  detail::check_inputs(in, z0, config.weights);

  SolverState state = initial_state(z0, in, config);
  const double focal = in.camera.is_perspective() ? in.camera.focal : 1.0;
  if (log) *log << "# k energy primal dual beta inner_mean cg_iterations\n";

  StopReason reason = StopReason::MaxIterations;
  for (int k = 0; k < config.max_iterations; ++k) {
    ThetaUpdateStats ts;
    state.theta = theta_update(state, in, config, &ts);

    const ScalarField z_prev = state.z;
    CgResult cg;
    state.z = z_update(state, in, config, &cg);
    state.psi = dual_update(state);

    const VectorField gz = gradient(state.z);
    const VectorField gprev = gradient(z_prev);
    detail::NeumaierSum primal_sq, dual_sq;
    for (std::size_t i = 0; i < gz.size(); ++i) {
      const double px = gz.x[i] - state.theta.x[i];
      const double py = gz.y[i] - state.theta.y[i];
      const double dx = gz.x[i] - gprev.x[i];
      const double dy = gz.y[i] - gprev.y[i];
      primal_sq += px * px + py * py;
      dual_sq += dx * dx + dy * dy;
    }
    Diagnostics& diag = state.diagnostics;
    diag.primal_residual = std::sqrt(primal_sq.value());
    diag.dual_residual = state.beta * std::sqrt(dual_sq.value());
    diag.floor_hits += ts.floor_hits;
    diag.cg_iterations.push_back(cg.iterations);
    if (!cg.converged) diag.cg_not_converged = true;

    const double energy = feasible_objective(state.z, config.weights, in);
    state.energy_history.push_back(energy);
    state.k = k + 1;

    IterationRecord rec{state.k,           energy, diag.primal_residual, diag.dual_residual,
                        state.beta,        ts.mean_inner_iterations, cg.iterations};
    diag.iterations.push_back(rec);
    if (log) detail::write_log_line(*log, rec);

    state.beta = penalty_update(state.beta, focal * diag.primal_residual,
                                diag.dual_residual / focal, config.penalty);

    const double previous = state.energy_history[state.energy_history.size() - 2];
    if (detail::relative_change_below(previous, energy, config.tolerance)) {
      reason = StopReason::RelativeEnergy;
      break;
    }
  }
  return detail::finish(std::move(state), in, reason);
}

}  // namespace sfs
