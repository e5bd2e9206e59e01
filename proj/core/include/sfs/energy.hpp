#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "sfs/camera.hpp"
#include "sfs/grid.hpp"
#include "sfs/shading.hpp"

namespace sfs {

/// Term weights of the constrained model: lambda (shading), mu (prior),
/// nu (surface area).
struct Weights {
  double lambda = 1.0;
  double mu = 0.0;
  double nu = 0.0;

  /// Throws Error(ConfigError) on negative weights or all-zero weights.
  void validate() const;
};

/// Prior depth z0 (in solver variables) on the sub-domain where it exists.
struct PriorData {
  ScalarField z0;                    // arbitrary values where !defined
  std::vector<std::uint8_t> defined;  // per inside pixel

  std::size_t count() const;
  /// Empty prior: no pixel defined.
  static PriorData none(const GridPtr& grid);
};

/// Everything the energies need besides the unknowns.
struct ModelInputs {
  GridPtr grid;
  CameraModel camera;
  PixelGeometry geom;
  Image image;
  Albedo albedo;
  Lighting lighting;
  std::optional<PriorData> prior;
};

/// Sum over channels and pixels of (a.theta + b - I)^2.
double shading_energy(const VectorField& theta, const PixelGeometry& geom, const Albedo& albedo,
                      const Lighting& lighting, const Image& image);
/// Sum over the prior sub-domain of (z - z0)^2.
double prior_energy(const ScalarField& z, const PriorData& prior);
/// Total surface area: sum of the area element.
double smoothness_energy(const VectorField& theta, const PixelGeometry& geom);

/// lambda E(theta) + mu P(z) + nu S(theta): the constrained objective
/// evaluated at an arbitrary (theta, z) pair.
double model_objective(const VectorField& theta, const ScalarField& z, const Weights& w,
                       const ModelInputs& in);

/// lambda E + mu P + nu S + <Psi, grad z - theta> + beta/2 |grad z - theta|^2.
double lagrangian_value(const VectorField& theta, const ScalarField& z, const VectorField& psi,
                        const Weights& w, double beta, const ModelInputs& in);

/// Data the theta-subproblem needs at one pixel.
struct PixelContext {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();    // (grad z)_p
  Eigen::Vector2d psi = Eigen::Vector2d::Zero();  // multiplier
  double f = 1.0;
  double xt = 0.0;
  double yt = 0.0;
  std::span<const ShVector> lighting;
  std::span<const double> rho;        // per channel
  std::span<const double> intensity;  // per channel
  double lambda = 0.0;
  double nu = 0.0;
  double beta = 1.0;
};

struct PixelEvaluation {
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  /// Gauss-Newton for the shading term, exact for the area and penalty terms.
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
  bool floored = false;
};

/// lambda sum_c (a.theta + b - I)^2 + nu d(theta) - Psi.theta + beta/2 |g - theta|^2,
/// i.e. the theta-dependent part of the Lagrangian at one pixel (Psi.g dropped).
PixelEvaluation pixel_objective(const Eigen::Vector2d& theta, const PixelContext& ctx,
                                bool with_hessian = true);

}  // namespace sfs
