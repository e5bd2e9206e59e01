#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "sfs/grid.hpp"

namespace sfs {

enum class Projection { Orthographic, Perspective };

struct CameraModel {
  Projection kind = Projection::Orthographic;
  double focal = 1.0;  // pixels; perspective only
  double cx = 0.0;     // principal point, pixel coordinates
  double cy = 0.0;

  static CameraModel orthographic() { return {}; }
  /// Throws Error(ConfigError) unless focal > 0 and the principal point is finite.
  static CameraModel perspective(double focal, double cx, double cy);

  bool is_perspective() const noexcept { return kind == Projection::Perspective; }
};

/// Per-pixel (f, x~, y~) from the camera: (1, 0, 0) orthographic,
/// (focal, x - cx, y - cy) perspective.
struct PixelGeometry {
  GridPtr grid;
  std::vector<double> f;
  std::vector<double> xt;
  std::vector<double> yt;

  std::size_t size() const noexcept { return f.size(); }
};

PixelGeometry pixel_geometry(const CameraModel& camera, const GridPtr& grid);

/// Floor applied to the area element inside energy evaluations.
inline constexpr double kAreaFloor = 1e-8;

/// sqrt(f^2 |theta|^2 + (1 + [x~, y~].theta)^2) for a single pixel.
inline double area_element(double f, double xt, double yt, double tx, double ty) noexcept {
  const double w = 1.0 + xt * tx + yt * ty;
  return std::sqrt(f * f * (tx * tx + ty * ty) + w * w);
}

/// Unnormalized normal [f theta; -1 - [x~, y~].theta].
inline Eigen::Vector3d raw_normal(double f, double xt, double yt, double tx,
                                  double ty) noexcept {
  return {f * tx, f * ty, -1.0 - xt * tx - yt * ty};
}

struct NormalField {
  GridPtr grid;
  std::vector<Eigen::Vector3d> n;

  std::size_t size() const noexcept { return n.size(); }
};

ScalarField d_map(const VectorField& theta, const PixelGeometry& geom);

/// Throws Error(DegenerateNormal) where the area element vanishes.
NormalField normals_from_gradient(const VectorField& theta, const PixelGeometry& geom);

/// Solver variable -> metric depth (identity, or exp under perspective).
ScalarField depth_from_z(const CameraModel& camera, const ScalarField& z);
/// Metric depth -> solver variable (identity, or log under perspective).
ScalarField z_from_depth(const CameraModel& camera, const ScalarField& depth);

}  // namespace sfs
