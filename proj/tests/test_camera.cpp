#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sfs/camera.hpp"
#include "sfs/error.hpp"
#include "support.hpp"

using namespace sfs;

namespace {

VectorField constant_theta(const GridPtr& g, double tx, double ty) {
  VectorField t(g);
  std::fill(t.x.begin(), t.x.end(), tx);
  std::fill(t.y.begin(), t.y.end(), ty);
  return t;
}

// Single-pixel geometry with explicit (f, x~, y~).
PixelGeometry one_pixel(double f, double xt, double yt) {
  auto g = MaskedGrid::full(1, 1);
  return PixelGeometry{g, {f}, {xt}, {yt}};
}

}  // namespace

TEST(Camera, OrthographicGeometry) {
  std::mt19937_64 rng(1);
  auto g = test::random_grid(rng, 7, 5);
  auto geom = pixel_geometry(CameraModel::orthographic(), g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    EXPECT_EQ(geom.f[i], 1.0);
    EXPECT_EQ(geom.xt[i], 0.0);
    EXPECT_EQ(geom.yt[i], 0.0);
  }
}

TEST(Camera, PerspectiveCenteredCoordinates) {
  auto g = MaskedGrid::full(64, 64);
  auto geom = pixel_geometry(CameraModel::perspective(500, 32, 32), g);
  const auto c = static_cast<std::size_t>(g->ordinal(32, 32));
  EXPECT_EQ(geom.f[c], 500.0);
  EXPECT_EQ(geom.xt[c], 0.0);
  EXPECT_EQ(geom.yt[c], 0.0);
  const auto p = static_cast<std::size_t>(g->ordinal(42, 30));
  EXPECT_EQ(geom.xt[p], 10.0);
  EXPECT_EQ(geom.yt[p], -2.0);
}

TEST(Camera, PerspectiveRejectsBadFocal) {
  EXPECT_THROW(CameraModel::perspective(0.0, 1, 1), Error);
  EXPECT_THROW(CameraModel::perspective(-3.0, 1, 1), Error);
}

TEST(Camera, AreaElementHandValues) {
  auto g = MaskedGrid::full(1, 1);
  auto ortho = pixel_geometry(CameraModel::orthographic(), g);
  EXPECT_DOUBLE_EQ(d_map(constant_theta(g, 0, 0), ortho)[0], 1.0);
  EXPECT_NEAR(d_map(constant_theta(g, 3, 4), ortho)[0], std::sqrt(26.0), 1e-14);
  EXPECT_NEAR(d_map(constant_theta(g, 1, 1), one_pixel(2, 1, 0))[0], std::sqrt(12.0), 1e-14);
}

TEST(Camera, NormalHandValues) {
  auto g = MaskedGrid::full(1, 1);
  auto ortho = pixel_geometry(CameraModel::orthographic(), g);
  auto n0 = normals_from_gradient(constant_theta(g, 0, 0), ortho).n[0];
  EXPECT_EQ(n0, Eigen::Vector3d(0, 0, -1));
  auto n1 = normals_from_gradient(constant_theta(g, 1, 0), ortho).n[0];
  EXPECT_NEAR((n1 - Eigen::Vector3d(1, 0, -1) / std::sqrt(2.0)).norm(), 0.0, 1e-15);
  auto n2 = normals_from_gradient(constant_theta(g, 0, 0), one_pixel(1, 0, 0)).n[0];
  EXPECT_EQ(n2, Eigen::Vector3d(0, 0, -1));
}

TEST(Camera, NormalsAreUnitAndMatchAreaElement) {
  std::mt19937_64 rng(9);
  auto g = MaskedGrid::full(16, 16);
  auto geom = pixel_geometry(CameraModel::perspective(300, 7.5, 8.0), g);
  auto theta = test::random_vector(rng, g, -10, 10);
  auto n = normals_from_gradient(theta, geom);
  auto d = d_map(theta, geom);
  for (std::size_t i = 0; i < g->size(); ++i) {
    EXPECT_NEAR(n.n[i].norm(), 1.0, 1e-12);
    const Eigen::Vector3d raw(geom.f[i] * theta.x[i], geom.f[i] * theta.y[i],
                              -1.0 - geom.xt[i] * theta.x[i] - geom.yt[i] * theta.y[i]);
    EXPECT_NEAR(d[i], raw.norm(), 1e-12 * raw.norm());
  }
}

TEST(Camera, OrthographicAreaAtLeastOne) {
  std::mt19937_64 rng(2);
  auto g = MaskedGrid::full(10, 10);
  auto geom = pixel_geometry(CameraModel::orthographic(), g);
  auto theta = test::random_vector(rng, g, -2, 2);
  theta.x[0] = theta.y[0] = 0.0;
  auto d = d_map(theta, geom);
  EXPECT_EQ(d[0], 1.0);
  for (std::size_t i = 1; i < d.size(); ++i) EXPECT_GT(d[i], 1.0);
}

TEST(Camera, DepthConversions) {
  auto g = MaskedGrid::full(2, 1);
  const auto ortho = CameraModel::orthographic();
  const auto persp = CameraModel::perspective(100, 0, 0);
  EXPECT_EQ(depth_from_z(ortho, ScalarField(g, {1, 2})).values, (std::vector<double>{1, 2}));
  EXPECT_EQ(depth_from_z(persp, ScalarField(g, 0.0)).values, (std::vector<double>{1, 1}));
  EXPECT_NEAR(depth_from_z(persp, ScalarField(g, std::log(2.0)))[0], 2.0, 1e-15);
  EXPECT_EQ(z_from_depth(persp, ScalarField(g, 1.0))[0], 0.0);
  EXPECT_NEAR(z_from_depth(persp, ScalarField(g, std::numbers::e))[0], 1.0, 1e-15);
  try {
    z_from_depth(persp, ScalarField(g, 0.0));
    FAIL() << "expected InvalidPriorDepth";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidPriorDepth);
  }
}

TEST(Camera, LogDepthRoundTrip) {
  std::mt19937_64 rng(4);
  auto g = MaskedGrid::full(8, 8);
  const auto persp = CameraModel::perspective(100, 0, 0);
  auto z = test::random_scalar(rng, g, -3, 3);
  auto back = z_from_depth(persp, depth_from_z(persp, z));
  for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(back[i], z[i], 1e-12);
}

TEST(Camera, DegenerateNormalThrows) {
  // f = 0 and 1 + x~ theta_x = 0 give a zero unnormalized normal.
  auto geom = one_pixel(0.0, 1.0, 0.0);
  VectorField t(geom.grid);
  t.x[0] = -1.0;
  try {
    normals_from_gradient(t, geom);
    FAIL() << "expected DegenerateNormal";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateNormal);
  }
}
