#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "sfs/camera.hpp"
#include "sfs/energy.hpp"
#include "sfs/grid.hpp"
#include "sfs/linear.hpp"
#include "sfs/shading.hpp"

namespace sfs {

/// Damped Newton with Armijo backtracking for the per-pixel theta problem.
struct NewtonSettings {
  int max_iterations = 20;
  double gradient_tolerance = 1e-9;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
};

/// Residual balancing for the penalty parameter.
/// Residual balancing. solve() compares residuals in focal-normalized units
/// (primal times f, dual over f) so perspective and orthographic runs adapt alike.
struct PenaltySettings {
  bool adaptive = true;
  double tau = 2.0;
  double ratio = 10.0;
};

struct SolverConfig {
  Weights weights;
  double beta0 = 1.0;  // in focal-normalized units, see initial_beta()
  double tolerance = 1e-3;  // relative variation of the objective
  int max_iterations = 500;
  NewtonSettings newton;
  CgSettings cg;
  PenaltySettings penalty;
  bool gauge_fix = true;
  /// Re-check the per-pixel descent contract after every theta update.
  bool check_descent = false;

  /// Throws Error(ConfigError) if a tolerance is nonpositive, tau <= 1 or ratio <= 1.
  void validate() const;
};

struct IterationRecord {
  int k = 0;
  double energy = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double beta = 0.0;
  double mean_inner_iterations = 0.0;
  int cg_iterations = 0;
};

struct Diagnostics {
  double primal_residual = 0.0;  // |grad z - theta|
  double dual_residual = 0.0;    // beta |grad (z_k - z_{k-1})|
  std::size_t floor_hits = 0;    // pixels where the area element hit the floor
  std::vector<int> cg_iterations;
  bool cg_not_converged = false;
  std::vector<IterationRecord> iterations;
};

struct SolverState {
  VectorField theta;
  ScalarField z;
  VectorField psi;
  double beta = 1.0;
  int k = 0;
  std::vector<double> energy_history;  // objective at (z, grad z), one per iterate
  double gauge_mean = 0.0;              // mean of the initial z
  Diagnostics diagnostics;
};

enum class StopReason { RelativeEnergy, MaxIterations };

struct SolveResult {
  SolverState state;
  ScalarField depth;  // metric depth (exp of z under perspective)
  NormalField normals;
  StopReason reason = StopReason::MaxIterations;
};

/// Bundles the problem data and derives the pixel geometry.
ModelInputs make_inputs(GridPtr grid, const CameraModel& camera, Image image = {},
                        Albedo albedo = {}, Lighting lighting = {},
                        std::optional<PriorData> prior = std::nullopt);

/// Curvature scale of the per-pixel theta problem in focal-normalized units:
/// 2 lambda mean(rho^2) |l_1..3|^2 summed over channels, plus nu. Falls back
/// to 1 when both terms vanish.
double theta_curvature_scale(const ModelInputs& in, const Weights& weights);

/// beta0 * f^2 * theta_curvature_scale(). The f^2 factor accounts for
/// log-depth gradients being of order 1/f under perspective (f = 1 otherwise).
double initial_beta(const SolverConfig& config, const ModelInputs& in);

/// Initial ADMM state: theta = grad z0, Psi = 0, beta = initial_beta().
SolverState initial_state(const ScalarField& z0, const ModelInputs& in,
                          const SolverConfig& config);

struct ThetaUpdateStats {
  double mean_inner_iterations = 0.0;
  std::size_t floor_hits = 0;
};

/// Per-pixel minimization of the Lagrangian in theta, warm-started at state.theta.
/// Never increases any pixel objective. Throws Error(SolverDiverged).
VectorField theta_update(const SolverState& state, const ModelInputs& in,
                         const SolverConfig& config, ThetaUpdateStats* stats = nullptr);

/// Solves (2 mu 1_prior + beta grad^T grad) z = 2 mu 1_prior z0 + grad^T (beta theta - Psi)
/// by PCG warm-started at state.z; re-anchors the mean when the system is singular.
ScalarField z_update(const SolverState& state, const ModelInputs& in, const SolverConfig& config,
                     CgResult* cg = nullptr);

/// Psi + beta (grad z - theta).
VectorField dual_update(const SolverState& state);

double penalty_update(double beta, double primal_residual, double dual_residual,
                      const PenaltySettings& settings);

/// Runs ADMM from z0 until the relative variation of the objective falls
/// below config.tolerance or the iteration cap. Per-iteration lines go to log
/// when given. Throws Error(ConfigError) on inconsistent inputs.
SolveResult solve(const ModelInputs& in, const ScalarField& z0, const SolverConfig& config,
                  std::ostream* log = nullptr);

/// Baseline that freezes a^c and b^c at the current gradient and solves the
/// resulting linear least-squares problem in z, repeatedly. Kept to reproduce
/// the instability of linearized schemes; no convergence guarantee.
/// Throws Error(DegenerateLinearization) when the frozen a^c vanish everywhere.
SolveResult solve_fixed_point(const ModelInputs& in, const ScalarField& z0,
                              const SolverConfig& config, std::ostream* log = nullptr);

/// Objective at the feasible pair (z, grad z).
double feasible_objective(const ScalarField& z, const Weights& w, const ModelInputs& in);

}  // namespace sfs
