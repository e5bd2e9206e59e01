#pragma once

#include <Eigen/Core>
#include <vector>

#include "sfs/camera.hpp"
#include "sfs/grid.hpp"

namespace sfs {

using ShVector = Eigen::Matrix<double, 9, 1>;

/// Second-order spherical-harmonic lighting: nine coefficients per channel,
/// ordered to match sh_basis().
struct Lighting {
  std::vector<ShVector> channels;

  std::size_t num_channels() const noexcept { return channels.size(); }
};

/// Per-channel reflectance over Ω.
struct Albedo {
  std::vector<ScalarField> channels;

  /// rho = 1 everywhere (uniformly white surface).
  static Albedo white(const GridPtr& grid, std::size_t num_channels);
  std::size_t num_channels() const noexcept { return channels.size(); }
};

struct Image {
  std::vector<ScalarField> channels;

  std::size_t num_channels() const noexcept { return channels.size(); }
  const GridPtr& grid() const { return channels.front().grid; }
};

/// [n1, n2, n3, 1, n1 n2, n1 n3, n2 n3, n1^2 - n2^2, 3 n3^2 - 1].
/// Throws Error(NotUnitNormal) if |n| deviates from 1 by more than 1e-9.
ShVector sh_basis(const Eigen::Vector3d& n);

/// sh_basis without the unit-length check; used on hot paths.
inline ShVector sh_basis_unchecked(const Eigen::Vector3d& n) noexcept {
  ShVector h;
  h << n.x(), n.y(), n.z(), 1.0, n.x() * n.y(), n.x() * n.z(), n.y() * n.z(),
      n.x() * n.x() - n.y() * n.y(), 3.0 * n.z() * n.z() - 1.0;
  return h;
}

/// I^c = rho^c * l^c . sh_basis(n), unclamped.
Image render(const NormalField& normals, const Albedo& albedo, const Lighting& lighting);

struct PdeCoefficients {
  std::vector<VectorField> a;  // per channel
  std::vector<ScalarField> b;  // per channel
};

/// The fields a^c(theta), b^c(theta) with a^c . theta + b^c equal to the
/// rendered intensity for the normal induced by theta. The area element is
/// floored at kAreaFloor.
PdeCoefficients pde_coefficients(const VectorField& theta, const PixelGeometry& geom,
                                 const Albedo& albedo, const Lighting& lighting);

struct LightingEstimate {
  Lighting lighting;
  std::vector<double> condition;  // per channel, of the 9x9 normal matrix
  bool rank_deficient = false;
};

/// Per-channel linear least squares for l^c from I^c ~ rho^c l^c . sh_basis(n).
/// Returns the minimum-norm solution when the system is rank-deficient.
/// Throws Error(InsufficientData) with fewer than 9 pixels of nonzero albedo.
LightingEstimate estimate_lighting(const Image& image, const NormalField& normals,
                                   const Albedo& albedo);

}  // namespace sfs
