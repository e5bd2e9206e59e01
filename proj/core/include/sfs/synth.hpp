#pragma once

#include <cstdint>
#include <string_view>

#include "sfs/camera.hpp"
#include "sfs/grid.hpp"
#include "sfs/shading.hpp"

namespace sfs {

/// 3(1-x)^2 e^{-x^2-(y+1)^2} - 10(x/5 - x^3 - y^5) e^{-x^2-y^2} - 1/3 e^{-(x+1)^2-y^2}
double peaks(double x, double y);

/// n x n samples of amplitude * peaks over [-3, 3]^2 on a full grid; row y
/// maps to the second peaks coordinate.
ScalarField peaks_surface(int n, double amplitude);

struct SphereCap {
  ScalarField depth;    // metric depth along the optical axis
  NormalField normals;  // analytic outward normals
};

/// Sphere of `radius` whose center sits at depth `center_depth` on the optical
/// axis (through the image center for orthographic cameras, through the
/// principal point for perspective ones). The mask keeps pixels within
/// cap_fraction of the silhouette radius. Orthographic units are pixels.
SphereCap sphere_cap_surface(int n, double radius, double cap_fraction,
                             const CameraModel& camera, double center_depth);

/// Orthographic convenience overload: center depth equals the radius, so the
/// apex sits at depth 0.
SphereCap sphere_cap_surface(int n, double radius, double cap_fraction);

/// Adds i.i.d. N(0, sigma^2) noise from a seeded generator.
ScalarField add_gaussian_noise(const ScalarField& field, double sigma, std::uint64_t seed);

/// Gaussian blur with standard deviation `width` pixels; taps leaving the
/// raster are clamped to the edge and taps outside the mask are dropped with
/// renormalization.
ScalarField smooth_initialization(const ScalarField& z, double width);

struct StandardLightings {
  Lighting l1;  // first order, greylevel
  Lighting l2;  // second order, greylevel
  Lighting l3;  // second order, three channels
};

StandardLightings standard_lightings();
/// "l1", "l2" or "l3"; throws Error(ConfigError) otherwise.
Lighting standard_lighting(std::string_view id);

struct SyntheticScene {
  GridPtr grid;
  CameraModel camera;
  ScalarField depth;  // ground-truth metric depth
  ScalarField z;      // ground truth in solver variables
  Albedo albedo;
  Lighting lighting;
  NormalField normals;  // from the discrete gradient of z
  Image image;          // clean rendering
  std::uint64_t seed = 0;
};

/// Renders the clean image from the discrete gradient of the depth with a
/// white albedo. The clean image reprojects with zero error.
SyntheticScene make_scene(const ScalarField& depth, const CameraModel& camera,
                          const Lighting& lighting, std::uint64_t seed = 0);

double max_value(const ScalarField& f);

/// Noisy observations of a scene. Noise levels are fractions of the clean
/// maxima (per image channel, and of the depth).
struct DegradedScene {
  Image image;        // clean image plus Gaussian noise
  ScalarField prior;  // depth plus Gaussian noise
  ScalarField init;   // prior smoothed with the given kernel width
};

/// Image and depth noise come from independent streams derived from `seed`.
DegradedScene degrade(const SyntheticScene& scene, double sigma_image, double sigma_depth,
                      double blur, std::uint64_t seed);

/// Peaks relief on an n x n grid with slopes of a few units in focal-normalized
/// terms: 100 + 2 peaks for orthographic cameras, 1 + (2/f) peaks under
/// perspective.
ScalarField peaks_depth(int n, const CameraModel& camera);

/// Sphere cap whose silhouette radius is 0.47 n pixels, masked to 90% of it.
/// Orthographic: radius 0.47 n centered at depth 2 radius. Perspective: center
/// depth 1 and the radius giving that silhouette.
SphereCap sphere_cap_scene(int n, const CameraModel& camera);

}  // namespace sfs
