#include "sfs/camera.hpp"

#include <cmath>
#include <string>

#include "sfs/error.hpp"

namespace sfs {

CameraModel CameraModel::perspective(double focal, double cx, double cy) {
  if (!(focal > 0.0) || !std::isfinite(focal)) {
    throw Error(ErrorCode::ConfigError, "perspective focal must be > 0, got " +
                                            std::to_string(focal));
  }
  if (!std::isfinite(cx) || !std::isfinite(cy)) {
    throw Error(ErrorCode::ConfigError, "principal point must be finite");
  }
  return CameraModel{Projection::Perspective, focal, cx, cy};
}

PixelGeometry pixel_geometry(const CameraModel& camera, const GridPtr& grid) {
  PixelGeometry g;
  g.grid = grid;
  const std::size_t n = grid->size();
  if (!camera.is_perspective()) {
    g.f.assign(n, 1.0);
    g.xt.assign(n, 0.0);
    g.yt.assign(n, 0.0);
    return g;
  }
  g.f.assign(n, camera.focal);
  g.xt.resize(n);
  g.yt.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.xt[i] = grid->x(i) - camera.cx;
    g.yt[i] = grid->y(i) - camera.cy;
  }
  return g;
}

ScalarField d_map(const VectorField& theta, const PixelGeometry& geom) {
  ScalarField d(theta.grid);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    d[i] = area_element(geom.f[i], geom.xt[i], geom.yt[i], theta.x[i], theta.y[i]);
  }
  return d;
}

NormalField normals_from_gradient(const VectorField& theta, const PixelGeometry& geom) {
  NormalField out;
  out.grid = theta.grid;
  out.n.resize(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const Eigen::Vector3d u =
        raw_normal(geom.f[i], geom.xt[i], geom.yt[i], theta.x[i], theta.y[i]);
    const double d = u.norm();
    if (!(d > 0.0)) {
      const auto& grid = *theta.grid;
      throw Error(ErrorCode::DegenerateNormal, "zero area element at pixel (" +
                                                   std::to_string(grid.x(i)) + ", " +
                                                   std::to_string(grid.y(i)) + ")");
    }
    out.n[i] = u / d;
  }
  return out;
}

ScalarField depth_from_z(const CameraModel& camera, const ScalarField& z) {
  if (!camera.is_perspective()) return z;
  ScalarField out(z.grid);
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i]);
    if (!std::isfinite(out[i])) {
      throw Error(ErrorCode::NonFiniteDepth,
                  "exp(" + std::to_string(z[i]) + ") is not finite");
    }
  }
  return out;
}

ScalarField z_from_depth(const CameraModel& camera, const ScalarField& depth) {
  if (!camera.is_perspective()) return depth;
  ScalarField out(depth.grid);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (!(depth[i] > 0.0)) {
      throw Error(ErrorCode::InvalidPriorDepth,
                  "perspective depth must be > 0, got " + std::to_string(depth[i]));
    }
    out[i] = std::log(depth[i]);
  }
  return out;
}

}  // namespace sfs
