#include "sfs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "sfs/error.hpp"

namespace sfs {

double peaks(double x, double y) {
  return 3.0 * (1.0 - x) * (1.0 - x) * std::exp(-x * x - (y + 1.0) * (y + 1.0)) -
         10.0 * (x / 5.0 - x * x * x - std::pow(y, 5)) * std::exp(-x * x - y * y) -
         1.0 / 3.0 * std::exp(-(x + 1.0) * (x + 1.0) - y * y);
}

ScalarField peaks_surface(int n, double amplitude) {
  if (n < 8) throw Error(ErrorCode::ConfigError, "peaks grid side must be >= 8");
  ScalarField z(MaskedGrid::full(n, n));
  const double step = 6.0 / (n - 1);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double x = -3.0 + step * z.grid->x(i);
    const double y = -3.0 + step * z.grid->y(i);
    z[i] = amplitude * peaks(x, y);
  }
  return z;
}

SphereCap sphere_cap_surface(int n, double radius, double cap_fraction,
                             const CameraModel& camera, double center_depth) {
  if (!(cap_fraction > 0.0 && cap_fraction <= 1.0)) {
    throw Error(ErrorCode::ConfigError, "cap fraction must lie in (0, 1]");
  }
  if (!(radius > 0.0) || n < 2) throw Error(ErrorCode::ConfigError, "invalid sphere cap");

  const bool persp = camera.is_perspective();
  const double cx = persp ? camera.cx : 0.5 * (n - 1);
  const double cy = persp ? camera.cy : 0.5 * (n - 1);
  if (persp && !(center_depth > radius)) {
    throw Error(ErrorCode::ConfigError, "sphere must lie in front of the camera");
  }
  // Silhouette radius in pixels (exact for orthographic, first order for perspective).
  const double silhouette = persp ? camera.focal * radius / center_depth : radius;
  const double mask_radius = cap_fraction * silhouette;

  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      if (dx * dx + dy * dy <= mask_radius * mask_radius) {
        mask[static_cast<std::size_t>(y) * n + x] = 1;
      }
    }
  }
  GridPtr grid = MaskedGrid::build(mask, n, n);

  SphereCap cap{ScalarField(grid), NormalField{grid, {}}};
  cap.normals.n.resize(grid->size());
  const Eigen::Vector3d center = persp ? Eigen::Vector3d(0.0, 0.0, center_depth)
                                       : Eigen::Vector3d(cx, cy, center_depth);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double px = grid->x(i);
    const double py = grid->y(i);
    Eigen::Vector3d point;
    if (persp) {
      // Ray t (u, v, 1); nearest intersection with the sphere.
      const Eigen::Vector3d dir((px - cx) / camera.focal, (py - cy) / camera.focal, 1.0);
      const double a = dir.squaredNorm();
      const double b = -2.0 * dir.dot(center);
      const double c = center.squaredNorm() - radius * radius;
      const double disc = std::max(b * b - 4.0 * a * c, 0.0);
      const double t = (-b - std::sqrt(disc)) / (2.0 * a);
      point = t * dir;
    } else {
      const double r2 = (px - cx) * (px - cx) + (py - cy) * (py - cy);
      point = Eigen::Vector3d(px, py, center_depth - std::sqrt(std::max(radius * radius - r2, 0.0)));
    }
    cap.depth[i] = point.z();
    cap.normals.n[i] = (point - center).normalized();
  }
  return cap;
}

SphereCap sphere_cap_surface(int n, double radius, double cap_fraction) {
  return sphere_cap_surface(n, radius, cap_fraction, CameraModel::orthographic(), radius);
}

ScalarField add_gaussian_noise(const ScalarField& field, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::ConfigError, "sigma must be >= 0");
  ScalarField out = field;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  for (double& v : out.values) v += dist(rng);
  return out;
}

ScalarField smooth_initialization(const ScalarField& z, double width) {
  if (!(width >= 0.0)) throw Error(ErrorCode::ConfigError, "kernel width must be >= 0");
  if (width == 0.0) return z;

  const MaskedGrid& grid = *z.grid;
  const int radius = static_cast<int>(std::ceil(3.0 * width));
  std::vector<double> kernel(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * k * k / (width * width));
  }

  ScalarField out(z.grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int x0 = grid.x(i);
    const int y0 = grid.y(i);
    double acc = 0.0;
    double wsum = 0.0;
    for (int dy = -radius; dy <= radius; ++dy) {
      const int y = std::clamp(y0 + dy, 0, grid.height() - 1);
      const double wy = kernel[dy + radius];
      for (int dx = -radius; dx <= radius; ++dx) {
        const int x = std::clamp(x0 + dx, 0, grid.width() - 1);
        const auto j = grid.ordinal(x, y);
        if (j == MaskedGrid::kOutside) continue;
        const double w = wy * kernel[dx + radius];
        acc += w * z[static_cast<std::size_t>(j)];
        wsum += w;
      }
    }
    out[i] = acc / wsum;
  }
  return out;
}

StandardLightings standard_lightings() {
  StandardLightings s;
  ShVector l1, l2, r, g, b;
  l1 << 0.1, -0.25, -0.7, 0.2, 0, 0, 0, 0, 0;
  l2 << 0.2, 0.3, -0.7, 0.5, -0.2, -0.2, 0.3, 0.3, 0.2;
  r << -0.2, -0.2, -1, 0.4, 0.1, -0.1, -0.1, -0.1, 0.05;
  g << 0, 0.2, -1, 0.3, 0, 0.2, 0.1, 0, 0.1;
  b << 0.2, -0.2, -1, 0.2, -0.1, 0, 0, 0.1, 0;
  s.l1.channels = {l1};
  s.l2.channels = {l2};
  s.l3.channels = {r, g, b};
  return s;
}

Lighting standard_lighting(std::string_view id) {
  const StandardLightings s = standard_lightings();
  if (id == "l1") return s.l1;
  if (id == "l2") return s.l2;
  if (id == "l3") return s.l3;
  throw Error(ErrorCode::ConfigError, "unknown lighting id '" + std::string(id) + "'");
}

SyntheticScene make_scene(const ScalarField& depth, const CameraModel& camera,
                          const Lighting& lighting, std::uint64_t seed) {
  SyntheticScene s;
  s.grid = depth.grid;
  s.camera = camera;
  s.depth = depth;
  s.z = z_from_depth(camera, depth);
  s.albedo = Albedo::white(s.grid, lighting.num_channels());
  s.lighting = lighting;
  s.normals = normals_from_gradient(gradient(s.z), pixel_geometry(camera, s.grid));
  s.image = render(s.normals, s.albedo, s.lighting);
  s.seed = seed;
  return s;
}

double max_value(const ScalarField& f) {
  return *std::max_element(f.values.begin(), f.values.end());
}

DegradedScene degrade(const SyntheticScene& scene, double sigma_image, double sigma_depth,
                      double blur, std::uint64_t seed) {
  if (!(sigma_image >= 0.0 && sigma_depth >= 0.0)) {
    throw Error(ErrorCode::ConfigError, "noise levels must be >= 0");
  }
  DegradedScene d;
  d.image = scene.image;
  for (auto& ch : d.image.channels) {
    ch = add_gaussian_noise(ch, sigma_image * max_value(ch), 2 * seed + 1);
  }
  d.prior = add_gaussian_noise(scene.depth, sigma_depth * max_value(scene.depth), 2 * seed + 2);
  d.init = smooth_initialization(d.prior, blur);
  return d;
}

ScalarField peaks_depth(int n, const CameraModel& camera) {
  const bool persp = camera.is_perspective();
  ScalarField z = peaks_surface(n, persp ? 2.0 / camera.focal : 2.0);
  const double offset = persp ? 1.0 : 100.0;
  for (double& v : z.values) v += offset;
  return z;
}

SphereCap sphere_cap_scene(int n, const CameraModel& camera) {
  constexpr double kSilhouette = 0.47;
  constexpr double kCap = 0.9;
  if (camera.is_perspective()) {
    return sphere_cap_surface(n, kSilhouette * n / camera.focal, kCap, camera, 1.0);
  }
  const double radius = kSilhouette * n;
  return sphere_cap_surface(n, radius, kCap, camera, 2.0 * radius);
}

}  // namespace sfs
