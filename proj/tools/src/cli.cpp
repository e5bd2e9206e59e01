#include "sfs_cli/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sfs/camera.hpp"
#include "sfs/error.hpp"
#include "sfs/io.hpp"
#include "sfs/metrics.hpp"
#include "sfs/shading.hpp"
#include "sfs/solver.hpp"
#include "sfs/synth.hpp"

namespace sfs::cli {
namespace {

namespace fs = std::filesystem;

// Thrown for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string image, mask, light, init, prior, config, albedo, out, log;
  std::string depth, estimate, truth;
  std::string surface = "peaks";
  std::string light_id = "l2";
  std::string camera = "ortho";
  double focal = 250.0;
  int size = 64;
  double sigma_i = 0.0;
  double sigma_z = 0.0;
  double blur = 4.0;
  std::uint64_t seed = 0;
  bool porcelain = false;
};

// Grid from --mask, or the full raster of `reference` when no mask is given.
GridPtr load_grid(const Options& o, const std::string& reference) {
  if (!o.mask.empty()) return io::read_mask(o.mask);
  const io::Raster r = io::read_raster(reference);
  return MaskedGrid::full(r.width, r.height);
}

io::ParsedConfig load_config(const Options& o, const SolverConfig& base) {
  if (o.config.empty()) {
    io::ParsedConfig cfg;
    cfg.solver = base;
    return cfg;
  }
  return io::parse_config(o.config, base);
}

Albedo load_albedo(const Options& o, const GridPtr& grid, std::size_t channels) {
  if (o.albedo.empty()) return Albedo::white(grid, channels);
  Image a = io::read_image(o.albedo, grid, channels);
  return Albedo{std::move(a.channels)};
}

// Depth file to log-depth z; undefined pixels are filled with the mean of
// the defined ones so that z is finite everywhere.
ScalarField load_z(const std::string& path, const GridPtr& grid, const CameraModel& camera,
                   std::vector<std::uint8_t>* defined = nullptr) {
  io::DepthMap d = io::read_depth(path, grid);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (d.defined[i]) {
      sum += d.values[i];
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::InvalidPriorDepth, path + ": no defined depth values");
  const double fill = sum / static_cast<double>(count);
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (!d.defined[i]) d.values[i] = fill;
  }
  if (defined) *defined = std::move(d.defined);
  return z_from_depth(camera, d.values);
}

void write_text(const std::string& path, const std::string& text) {
  io::write_file_atomic(path, text);
}

const char* reason_name(StopReason r) {
  return r == StopReason::RelativeEnergy ? "relative_energy" : "max_iterations";
}

int cmd_gen(const Options& o, std::ostream& out) {
  if (o.size < 8) throw UsageError("--size must be at least 8");
  const CameraModel camera =
      o.camera == "persp"
          ? CameraModel::perspective(o.focal, 0.5 * (o.size - 1), 0.5 * (o.size - 1))
          : CameraModel::orthographic();
  const Lighting lighting = standard_lighting(o.light_id);

  const ScalarField depth =
      o.surface == "sphere" ? sphere_cap_scene(o.size, camera).depth : peaks_depth(o.size, camera);
  const SyntheticScene scene = make_scene(depth, camera, lighting, o.seed);
  const DegradedScene noisy = degrade(scene, o.sigma_i, o.sigma_z, o.blur, o.seed);

  const fs::path dir = o.out;
  fs::create_directories(dir);
  io::write_mask(dir / "mask.pgm", *scene.grid);
  io::write_image(dir / "image.pfm", noisy.image);
  io::write_image(dir / "image_clean.pfm", scene.image);
  io::write_depth(dir / "depth.pfm", depth);
  io::write_depth(dir / "prior.pfm", noisy.prior);
  io::write_depth(dir / "init.pfm", noisy.init);
  io::write_lighting(dir / "light.txt", lighting);
  write_text((dir / "camera.cfg").string(), io::camera_config_text(camera));
  out << "wrote " << scene.grid->size() << " pixels to " << dir.string() << '\n';
  return kSuccess;
}

int cmd_render(const Options& o, std::ostream& out) {
  const io::ParsedConfig cfg = load_config(o, {});
  const GridPtr grid = load_grid(o, o.depth);
  const CameraModel camera = cfg.resolve_camera(grid->width(), grid->height());
  const Lighting lighting = io::read_lighting(o.light);
  const ScalarField z = load_z(o.depth, grid, camera);
  const NormalField n = normals_from_gradient(gradient(z), pixel_geometry(camera, grid));
  const Image image = render(n, load_albedo(o, grid, lighting.num_channels()), lighting);
  io::write_image(o.out, image);
  out << "rendered " << grid->size() << " pixels\n";
  return kSuccess;
}

struct Problem {
  GridPtr grid;
  io::ParsedConfig cfg;
  CameraModel camera;
  ModelInputs inputs;
  ScalarField z0;
};

Problem load_problem(const Options& o, const SolverConfig& base, bool with_prior) {
  Problem p;
  p.grid = load_grid(o, o.image);
  p.cfg = load_config(o, base);
  p.camera = p.cfg.resolve_camera(p.grid->width(), p.grid->height());
  const Lighting lighting = io::read_lighting(o.light);
  const std::size_t c = lighting.num_channels();
  Image image = io::read_image(o.image, p.grid, c);
  Albedo albedo = load_albedo(o, p.grid, c);

  std::optional<PriorData> prior;
  if (with_prior) {
    std::vector<std::uint8_t> defined;
    ScalarField z = load_z(o.prior, p.grid, p.camera, &defined);
    prior = PriorData{std::move(z), std::move(defined)};
  }
  if (!o.init.empty()) {
    p.z0 = load_z(o.init, p.grid, p.camera);
  } else if (prior) {
    p.z0 = prior->z0;
  } else {
    throw UsageError("--init is required");
  }
  p.inputs = make_inputs(p.grid, p.camera, std::move(image), std::move(albedo), lighting,
                         std::move(prior));
  return p;
}

int finish_solve(const Options& o, const Problem& p, const SolveResult& r,
                 const std::string& log_text, std::ostream& out) {
  io::write_depth(o.out, r.depth);
  const std::string log_path = o.log.empty() ? o.out + ".log" : o.log;
  write_text(log_path, log_text);
  const Image reproj = render(r.normals, p.inputs.albedo, p.inputs.lighting);
  out << "iterations=" << r.state.k << " reason=" << reason_name(r.reason)
      << " energy=" << r.state.energy_history.back()
      << " rmse=" << reprojection_rmse(p.inputs.image, reproj) << '\n';
  return kSuccess;
}

int cmd_solve(const Options& o, std::ostream& out, bool refine) {
  SolverConfig base;
  base.weights = refine ? Weights{1.0, 1.0, 5e-5} : Weights{1.0, 0.0, 0.0};
  if (refine && o.prior.empty()) throw UsageError("refine requires --prior");
  const Problem p = load_problem(o, base, refine);
  std::ostringstream log;
  const SolveResult r = solve(p.inputs, p.z0, p.cfg.solver, &log);
  return finish_solve(o, p, r, log.str(), out);
}

int cmd_fixed_point(const Options& o, std::ostream& out) {
  const Problem p = load_problem(o, SolverConfig{}, false);
  std::ostringstream log;
  const SolveResult r = solve_fixed_point(p.inputs, p.z0, p.cfg.solver, &log);
  return finish_solve(o, p, r, log.str(), out);
}

int cmd_estimate_light(const Options& o, std::ostream& out) {
  const GridPtr grid = load_grid(o, o.image);
  const io::ParsedConfig cfg = load_config(o, {});
  const CameraModel camera = cfg.resolve_camera(grid->width(), grid->height());
  const Image image = io::read_image(o.image, grid);
  const ScalarField z = load_z(o.depth, grid, camera);
  const NormalField n = normals_from_gradient(gradient(z), pixel_geometry(camera, grid));
  const LightingEstimate est =
      estimate_lighting(image, n, load_albedo(o, grid, image.num_channels()));
  io::write_lighting(o.out, est.lighting);
  out << "channels=" << est.lighting.num_channels()
      << " rank_deficient=" << (est.rank_deficient ? 1 : 0);
  for (std::size_t c = 0; c < est.condition.size(); ++c) {
    out << " condition_" << c << '=' << est.condition[c];
  }
  out << '\n';
  return kSuccess;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const GridPtr grid = load_grid(o, o.image);
  const io::ParsedConfig cfg = load_config(o, {});
  const CameraModel camera = cfg.resolve_camera(grid->width(), grid->height());
  const PixelGeometry geom = pixel_geometry(camera, grid);
  const Lighting lighting = io::read_lighting(o.light);
  const Image image = io::read_image(o.image, grid, lighting.num_channels());
  const Albedo albedo = load_albedo(o, grid, lighting.num_channels());

  const NormalField n = normals_from_gradient(gradient(load_z(o.estimate, grid, camera)), geom);
  const Image reproj = render(n, albedo, lighting);

  EvalReport report;
  report.pixels = grid->size();
  for (std::size_t c = 0; c < image.num_channels(); ++c) {
    report.rmse_per_channel.push_back(channel_rmse(image.channels[c], reproj.channels[c]));
  }
  report.rmse = reprojection_rmse(image, reproj);
  if (!o.truth.empty()) {
    const NormalField t = normals_from_gradient(gradient(load_z(o.truth, grid, camera)), geom);
    report.mae_degrees = normal_mae(n, t);
  }
  // The estimate is evaluated at the feasible pair (z, grad z).
  report.primal_residual = 0.0;
  if (o.porcelain) {
    print_report_porcelain(out, report);
  } else {
    print_report(out, report);
  }
  return kSuccess;
}

// Flags shared by the solver front ends.
void add_problem_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--image", o.image, "Input image (PFM, PGM or PPM)")->required();
  cmd->add_option("--mask", o.mask, "Domain mask, nonzero inside (default: full raster)");
  cmd->add_option("--light", o.light, "Lighting file")->required();
  cmd->add_option("--albedo", o.albedo, "Albedo image (default: white)");
  cmd->add_option("--config", o.config, "key=value solver and camera settings");
  cmd->add_option("--out", o.out, "Output depth (PFM)")->required();
  cmd->add_option("--log", o.log, "Per-iteration log (default: <out>.log)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Shape from shading under spherical-harmonic lighting"};
  app.require_subcommand(1, 1);

  auto* gen = app.add_subcommand("gen", "Write a synthetic scene bundle");
  gen->add_option("--surface", o.surface, "peaks or sphere")
      ->check(CLI::IsMember({"peaks", "sphere"}))
      ->capture_default_str();
  gen->add_option("--light", o.light_id, "l1, l2 or l3")
      ->check(CLI::IsMember({"l1", "l2", "l3"}))
      ->capture_default_str();
  gen->add_option("--size", o.size, "Raster side in pixels")->capture_default_str();
  gen->add_option("--sigma-i", o.sigma_i, "Image noise, fraction of the max intensity")
      ->capture_default_str();
  gen->add_option("--sigma-z", o.sigma_z, "Depth noise, fraction of the max depth")
      ->capture_default_str();
  gen->add_option("--seed", o.seed, "Noise seed")->capture_default_str();
  gen->add_option("--blur", o.blur, "Gaussian width of the initialization, pixels")
      ->capture_default_str();
  gen->add_option("--camera", o.camera, "ortho or persp")
      ->check(CLI::IsMember({"ortho", "persp"}))
      ->capture_default_str();
  gen->add_option("--focal", o.focal, "Focal length in pixels (persp)")->capture_default_str();
  gen->add_option("--out", o.out, "Output directory")->required();

  auto* rnd = app.add_subcommand("render", "Render an image from depth and lighting");
  rnd->add_option("--depth", o.depth, "Depth (PFM)")->required();
  rnd->add_option("--mask", o.mask, "Domain mask (default: full raster)");
  rnd->add_option("--light", o.light, "Lighting file")->required();
  rnd->add_option("--albedo", o.albedo, "Albedo image (default: white)");
  rnd->add_option("--config", o.config, "Camera settings");
  rnd->add_option("--out", o.out, "Output image (PFM)")->required();

  auto* sol = app.add_subcommand("solve", "Shape from shading, weights (1, 0, 0) by default");
  add_problem_flags(sol, o);
  sol->add_option("--init", o.init, "Initial depth (PFM)")->required();

  auto* ref = app.add_subcommand("refine", "Depth refinement with a prior, weights (1, 1, 5e-5)");
  add_problem_flags(ref, o);
  ref->add_option("--prior", o.prior, "Prior depth, NaN where missing (PFM)");
  ref->add_option("--init", o.init, "Initial depth (default: the prior, holes filled)");

  auto* est = app.add_subcommand("estimate-light", "Lighting from image and gross depth");
  est->add_option("--image", o.image, "Input image")->required();
  est->add_option("--depth", o.depth, "Gross depth (PFM)")->required();
  est->add_option("--mask", o.mask, "Domain mask (default: full raster)");
  est->add_option("--albedo", o.albedo, "Albedo image (default: white)");
  est->add_option("--config", o.config, "Camera settings");
  est->add_option("--out", o.out, "Output lighting file")->required();

  auto* ev = app.add_subcommand("eval", "Reprojection RMSE and normal MAE");
  ev->add_option("--image", o.image, "Input image")->required();
  ev->add_option("--estimate", o.estimate, "Estimated depth (PFM)")->required();
  ev->add_option("--truth", o.truth, "Ground-truth depth; MAE is 0 without it");
  ev->add_option("--mask", o.mask, "Domain mask (default: full raster)");
  ev->add_option("--light", o.light, "Lighting file")->required();
  ev->add_option("--albedo", o.albedo, "Albedo image (default: white)");
  ev->add_option("--config", o.config, "Camera settings");
  ev->add_flag("--porcelain", o.porcelain, "key=value output");

  auto* fp = app.add_subcommand("fixed-point", "Linearized fixed-point baseline");
  add_problem_flags(fp, o);
  fp->add_option("--init", o.init, "Initial depth (PFM)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(o, out);
    if (rnd->parsed()) return cmd_render(o, out);
    if (sol->parsed()) return cmd_solve(o, out, false);
    if (ref->parsed()) return cmd_solve(o, out, true);
    if (est->parsed()) return cmd_estimate_light(o, out);
    if (ev->parsed()) return cmd_eval(o, out);
    if (fp->parsed()) return cmd_fixed_point(o, out);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigError ? kUsage : kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace sfs::cli
