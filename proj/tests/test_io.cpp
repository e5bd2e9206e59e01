#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include "sfs/error.hpp"
#include "sfs/io.hpp"
#include "sfs/synth.hpp"
#include "support.hpp"

using namespace sfs;

namespace {

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream(path, std::ios::binary) << bytes;
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no sfs::Error thrown";
  return ErrorCode::ConfigError;
}

}  // namespace

TEST(Io, PfmRoundTripIsBitExact) {
  test::TempDir dir("pfm");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(-1e6f, 1e6f);
  io::Raster r{7, 5, 3, {}};
  for (int k = 0; k < 7 * 5 * 3; ++k) r.data.push_back(u(rng));
  r.data[4] = std::numeric_limits<float>::denorm_min();
  io::write_pfm(dir.file("a.pfm"), r);
  const io::Raster back = io::read_pfm(dir.file("a.pfm"));
  ASSERT_EQ(back.width, 7);
  ASSERT_EQ(back.height, 5);
  ASSERT_EQ(back.channels, 3);
  EXPECT_EQ(std::memcmp(back.data.data(), r.data.data(), r.data.size() * 4), 0);
}

TEST(Io, PfmLayout) {
  test::TempDir dir("pfm_layout");
  io::Raster r{2, 2, 1, {1, 2, 3, 4}};  // top row (1, 2)
  io::write_pfm(dir.file("a.pfm"), r);
  const std::string bytes = read_bytes(dir.file("a.pfm"));
  const std::string header = "Pf\n2 2\n-1.0\n";
  ASSERT_EQ(bytes.substr(0, header.size()), header);
  float first;
  std::memcpy(&first, bytes.data() + header.size(), 4);
  EXPECT_EQ(first, 3.0f);  // bottom row stored first
}

TEST(Io, PfmBigEndianRead) {
  test::TempDir dir("pfm_be");
  std::string bytes = "Pf\n1 1\n1.0\n";
  const float v = 0.75f;
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  for (int s = 24; s >= 0; s -= 8) bytes.push_back(static_cast<char>((u >> s) & 0xFF));
  write_bytes(dir.file("be.pfm"), bytes);
  EXPECT_EQ(io::read_pfm(dir.file("be.pfm")).data[0], 0.75f);
}

TEST(Io, ImageRoundTripThreeChannels) {
  test::TempDir dir("img");
  std::mt19937_64 rng(2);
  auto g = test::random_grid(rng, 9, 6);
  Image img;
  for (int c = 0; c < 3; ++c) {
    ScalarField ch(g);
    for (double& v : ch.values) v = static_cast<float>(std::uniform_real_distribution<double>(0, 1)(rng));
    img.channels.push_back(ch);
  }
  io::write_image(dir.file("i.pfm"), img);
  const Image back = io::read_image(dir.file("i.pfm"), g, 3);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(back.channels[c].values, img.channels[c].values);
  EXPECT_EQ(code_of([&] { io::read_image(dir.file("i.pfm"), g, 1); }), ErrorCode::FormatError);
}

TEST(Io, PgmScaling) {
  test::TempDir dir("pgm");
  write_bytes(dir.file("a.pgm"), std::string("P5\n2 1\n255\n") + '\xFF' + '\x00');
  const io::Raster r = io::read_raster(dir.file("a.pgm"));
  EXPECT_EQ(r.data[0], 1.0f);
  EXPECT_EQ(r.data[1], 0.0f);

  write_bytes(dir.file("b.pgm"), std::string("P5\n1 1\n65535\n") + '\x80' + '\x00');
  EXPECT_NEAR(io::read_raster(dir.file("b.pgm")).data[0], 32768.0 / 65535.0, 1e-7);
}

TEST(Io, TruncatedFilesRejected) {
  test::TempDir dir("trunc");
  write_bytes(dir.file("t.pfm"), "Pf\n4 4\n-1.0\n\x01\x02");
  EXPECT_EQ(code_of([&] { io::read_raster(dir.file("t.pfm")); }), ErrorCode::FormatError);
  write_bytes(dir.file("t.pgm"), "P5\n4 4\n255\nabc");
  EXPECT_EQ(code_of([&] { io::read_raster(dir.file("t.pgm")); }), ErrorCode::FormatError);
  write_bytes(dir.file("h.pfm"), "Pf\n4");
  EXPECT_EQ(code_of([&] { io::read_raster(dir.file("h.pfm")); }), ErrorCode::FormatError);
  EXPECT_EQ(code_of([&] { io::read_raster(dir.file("missing.pfm")); }), ErrorCode::FormatError);
}

TEST(Io, MaskRoundTrip) {
  test::TempDir dir("mask");
  std::mt19937_64 rng(3);
  auto g = test::random_grid(rng, 11, 8);
  io::write_mask(dir.file("m.pgm"), *g);
  EXPECT_EQ(io::read_mask(dir.file("m.pgm"))->mask(), g->mask());
}

TEST(Io, DepthNanConvention) {
  test::TempDir dir("depth");
  auto g = MaskedGrid::full(4, 4);
  ScalarField d(g, 2.0);
  std::vector<std::uint8_t> defined(16, 1);
  defined[1] = defined[5] = defined[9] = 0;
  io::write_depth(dir.file("d.pfm"), d, &defined);
  const io::DepthMap back = io::read_depth(dir.file("d.pfm"), g);
  EXPECT_EQ(back.defined, defined);
  std::size_t count = 0;
  for (auto f : back.defined) count += f;
  EXPECT_EQ(count, g->size() - 3);

  std::vector<std::uint8_t> none(16, 0);
  io::write_depth(dir.file("n.pfm"), d, &none);
  const io::DepthMap empty = io::read_depth(dir.file("n.pfm"), g);
  EXPECT_EQ(PriorData({empty.values, empty.defined}).count(), 0u);
}

TEST(Io, DepthOutsideMaskIsNan) {
  test::TempDir dir("depth_mask");
  const std::vector<std::uint8_t> mask{1, 0, 1, 1};
  auto g = MaskedGrid::build(mask, 2, 2);
  io::write_depth(dir.file("d.pfm"), ScalarField(g, 1.5));
  const io::Raster r = io::read_pfm(dir.file("d.pfm"));
  EXPECT_TRUE(std::isnan(r.at(1, 0)));
  EXPECT_EQ(r.at(0, 0), 1.5f);
}

TEST(Io, SampleLightingFiles) {
  const std::string dir = SFS_LIGHTING_DIR;
  EXPECT_EQ(io::read_lighting(dir + "/l1.txt").channels, standard_lighting("l1").channels);
  EXPECT_EQ(io::read_lighting(dir + "/l2.txt").channels, standard_lighting("l2").channels);
  EXPECT_EQ(io::read_lighting(dir + "/l3.txt").channels, standard_lighting("l3").channels);
}

TEST(Io, LightingFormatErrors) {
  EXPECT_EQ(code_of([] { io::parse_lighting("1\n1 2 3 4 5 6 7 8\n"); }), ErrorCode::FormatError);
  EXPECT_EQ(code_of([] { io::parse_lighting("2\n1 2 3 4 5 6 7 8 9\n"); }), ErrorCode::FormatError);
  EXPECT_EQ(code_of([] { io::parse_lighting("1\n1 2 3 4 5 6 7 8 x\n"); }), ErrorCode::FormatError);
  EXPECT_NO_THROW(io::parse_lighting("1\n1 2 3 4 5 6 7 8 9\n"));
}

TEST(Io, LightingRoundTrip) {
  test::TempDir dir("light");
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01;
  Lighting L;
  for (int c = 0; c < 3; ++c) {
    ShVector l;
    for (int k = 0; k < 9; ++k) l[k] = n01(rng);
    L.channels.push_back(l);
  }
  io::write_lighting(dir.file("l.txt"), L);
  EXPECT_EQ(io::read_lighting(dir.file("l.txt")).channels, L.channels);
}

TEST(Io, ConfigDefaults) {
  const io::ParsedConfig c = io::parse_config_text("");
  EXPECT_FALSE(c.camera.is_perspective());
  EXPECT_EQ(c.solver.weights.lambda, 1.0);
  EXPECT_EQ(c.solver.weights.mu, 0.0);
  EXPECT_EQ(c.solver.tolerance, 1e-3);
}

TEST(Io, ConfigRecommendedSetting) {
  const io::ParsedConfig c = io::parse_config_text("lambda=1\nmu=1\nnu=5e-5\n");
  EXPECT_EQ(c.solver.weights.lambda, 1.0);
  EXPECT_EQ(c.solver.weights.mu, 1.0);
  EXPECT_EQ(c.solver.weights.nu, 5e-5);
}

TEST(Io, ConfigBaseAndCamera) {
  SolverConfig base;
  base.weights = {1, 1, 5e-5};
  const io::ParsedConfig c =
      io::parse_config_text("# comment\nnu = 0.1\ncamera=persp\nfocal=300\n", base);
  EXPECT_EQ(c.solver.weights.mu, 1.0);
  EXPECT_EQ(c.solver.weights.nu, 0.1);
  const CameraModel cam = c.resolve_camera(64, 48);
  EXPECT_TRUE(cam.is_perspective());
  EXPECT_EQ(cam.focal, 300.0);
  EXPECT_EQ(cam.cx, 31.5);
  EXPECT_EQ(cam.cy, 23.5);
  const io::ParsedConfig back = io::parse_config_text(io::camera_config_text(cam));
  EXPECT_EQ(back.resolve_camera(1, 1).cx, 31.5);
}

TEST(Io, ConfigErrors) {
  EXPECT_EQ(code_of([] { io::parse_config_text("camera=persp\n"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { io::parse_config_text("camera=persp\nfocal=-1\n"); }),
            ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { io::parse_config_text("lamda=1\n"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { io::parse_config_text("lambda=abc\n"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { io::parse_config_text("tol=0\n"); }), ErrorCode::ConfigError);
}
