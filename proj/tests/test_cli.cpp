#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sfs/io.hpp"
#include "sfs/synth.hpp"
#include "sfs_cli/cli.hpp"
#include "support.hpp"

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "sfs");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = sfs::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// A small bundle shared by the solver tests.
class CliBundle : public ::testing::Test {
 protected:
  void SetUp() override {
    ASSERT_EQ(run({"gen", "--size", "24", "--light", "l2", "--seed", "3", "--out", b("")}).code, 0);
  }
  std::string b(const std::string& name) const { return (dir_.path() / "bundle" / name).string(); }
  std::string o(const std::string& name) const { return dir_.file(name); }

  sfs::test::TempDir dir_{"cli"};
};

}  // namespace

TEST(Cli, HelpExitsZeroAndShowsDefaults) {
  const Result r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("gen"), std::string::npos);
  const Result g = run({"gen", "--help"});
  EXPECT_EQ(g.code, 0);
  EXPECT_NE(g.out.find("[64]"), std::string::npos);  // --size default
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"nonsense"}).code, 1);
  EXPECT_EQ(run({"gen", "--out", "x", "--surface", "cube"}).code, 1);
  const Result r = run({"refine", "--image", "i.pfm", "--light", "l.txt", "--out", "z.pfm"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, MissingFileIsFailure) {
  sfs::test::TempDir dir("cli_missing");
  const Result r = run({"solve", "--image", dir.file("none.pfm"), "--light", dir.file("l.txt"),
                        "--init", dir.file("i.pfm"), "--out", dir.file("z.pfm")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, GenIsReproducible) {
  sfs::test::TempDir dir("cli_gen");
  const std::vector<std::string> common{"gen",         "--surface", "peaks", "--light",   "l3",
                                        "--size",      "32",        "--sigma-i", "0.02",
                                        "--sigma-z",   "0.002",     "--seed",    "7"};
  auto a = common, b = common;
  a.insert(a.end(), {"--out", dir.file("a")});
  b.insert(b.end(), {"--out", dir.file("b")});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.file("a"))) {
    const auto other = std::filesystem::path(dir.file("b")) / e.path().filename();
    EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path();
    ++files;
  }
  EXPECT_EQ(files, 8u);
  auto grid = sfs::io::read_mask(dir.file("a") + "/mask.pgm");
  EXPECT_EQ(sfs::io::read_image(dir.file("a") + "/image.pfm", grid).num_channels(), 3u);
}

TEST(Cli, GenSphereUnderPerspective) {
  sfs::test::TempDir dir("cli_sphere");
  ASSERT_EQ(run({"gen", "--surface", "sphere", "--camera", "persp", "--focal", "200", "--size",
                 "32", "--out", dir.file("s")})
                .code,
            0);
  EXPECT_NE(slurp(dir.file("s") + "/camera.cfg").find("camera=persp"), std::string::npos);
}

TEST_F(CliBundle, SolveWritesDepthAndLog) {
  const Result r = run({"solve", "--image", b("image.pfm"), "--mask", b("mask.pgm"), "--light",
                        b("light.txt"), "--init", b("init.pfm"), "--config", b("camera.cfg"),
                        "--out", o("z.pfm")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(o("z.pfm")));
  EXPECT_NE(slurp(o("z.pfm.log")).find("# k energy"), std::string::npos);
  EXPECT_NE(r.out.find("reason="), std::string::npos);
}

TEST_F(CliBundle, SolveIsBitIdentical) {
  const std::vector<std::string> base{"solve", "--image", b("image.pfm"), "--light",
                                      b("light.txt"), "--init", b("init.pfm")};
  auto a = base, c = base;
  a.insert(a.end(), {"--out", o("a.pfm"), "--log", o("a.log")});
  c.insert(c.end(), {"--out", o("c.pfm"), "--log", o("c.log")});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(c).code, 0);
  EXPECT_EQ(slurp(o("a.pfm")), slurp(o("c.pfm")));
  EXPECT_EQ(slurp(o("a.log")), slurp(o("c.log")));
}

TEST_F(CliBundle, RefineWithHoles) {
  auto grid = sfs::io::read_mask(b("mask.pgm"));
  auto prior = sfs::io::read_depth(b("prior.pfm"), grid);
  for (std::size_t i = 0; i < prior.defined.size(); i += 5) prior.defined[i] = 0;
  sfs::io::write_depth(o("holes.pfm"), prior.values, &prior.defined);
  const Result r = run({"refine", "--image", b("image.pfm"), "--light", b("light.txt"),
                        "--prior", o("holes.pfm"), "--out", o("r.pfm")});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliBundle, BadConfigIsUsageError) {
  std::ofstream(o("bad.cfg")) << "lamda=1\n";
  const Result r = run({"solve", "--image", b("image.pfm"), "--light", b("light.txt"), "--init",
                        b("init.pfm"), "--config", o("bad.cfg"), "--out", o("z.pfm")});
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliBundle, EvalPorcelain) {
  const Result r = run({"eval", "--image", b("image_clean.pfm"), "--estimate", b("depth.pfm"),
                        "--truth", b("depth.pfm"), "--light", b("light.txt"), "--porcelain"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto at = r.out.find("mae_degrees=");
  ASSERT_NE(at, std::string::npos);
  EXPECT_LT(std::stod(r.out.substr(at + 12)), 1e-5);  // acos rounding near 1
  EXPECT_NE(r.out.find("rmse="), std::string::npos);
  EXPECT_NE(r.out.find("pixels=576\n"), std::string::npos);
}

TEST_F(CliBundle, RenderMatchesCleanImage) {
  ASSERT_EQ(run({"render", "--depth", b("depth.pfm"), "--light", b("light.txt"), "--out",
                 o("i.pfm")})
                .code,
            0);
  auto grid = sfs::io::read_mask(b("mask.pgm"));
  const auto rendered = sfs::io::read_image(o("i.pfm"), grid);
  const auto clean = sfs::io::read_image(b("image_clean.pfm"), grid);
  // Depth passes through float32, so allow single-precision differences.
  for (std::size_t i = 0; i < grid->size(); ++i) {
    EXPECT_NEAR(rendered.channels[0][i], clean.channels[0][i], 1e-4);
  }
}

TEST_F(CliBundle, EstimateLight) {
  ASSERT_EQ(run({"estimate-light", "--image", b("image_clean.pfm"), "--depth", b("depth.pfm"),
                 "--out", o("l.txt")})
                .code,
            0);
  const auto est = sfs::io::read_lighting(o("l.txt"));
  const auto truth = sfs::standard_lighting("l2");
  EXPECT_LE((est.channels[0] - truth.channels[0]).cwiseAbs().maxCoeff(), 1e-3);
}

TEST_F(CliBundle, FixedPointRuns) {
  std::ofstream(o("short.cfg")) << "max_iter=3\n";
  const Result r = run({"fixed-point", "--image", b("image.pfm"), "--light", b("light.txt"),
                        "--init", b("init.pfm"), "--config", o("short.cfg"), "--out", o("f.pfm")});
  EXPECT_EQ(r.code, 0) << r.err;
}
