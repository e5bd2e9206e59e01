#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sfs/camera.hpp"
#include "sfs/energy.hpp"
#include "sfs/grid.hpp"
#include "sfs/shading.hpp"
#include "sfs/solver.hpp"

namespace sfs::io {

/// Full raster, row-major from the top row, channels interleaved.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> data;

  float at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  float& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

/// PFM ("Pf" greylevel, "PF" three-channel). Either byte order on read; writes
/// little-endian with scale -1. Rows are stored bottom-up per the format.
Raster read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const Raster& raster);

/// PFM as-is, or binary PGM/PPM (P5/P6, 8 or 16 bit) scaled to [0, 1].
/// Throws Error(FormatError).
Raster read_raster(const std::filesystem::path& path);

/// Binary PGM, 8 bit.
void write_pgm(const std::filesystem::path& path, const Raster& raster);

/// Inside where the value is nonzero and finite.
GridPtr read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const MaskedGrid& grid);

/// Image restricted to the grid. Throws Error(FormatError) on size or
/// channel mismatch (expected_channels = 0 accepts any count).
Image read_image(const std::filesystem::path& path, const GridPtr& grid,
                 std::size_t expected_channels = 0);
/// Pixels outside the mask are written as 0.
void write_image(const std::filesystem::path& path, const Image& image);

struct DepthMap {
  ScalarField values;                 // NaN-free; 0 where undefined
  std::vector<std::uint8_t> defined;  // per inside pixel
};

/// Single-channel PFM; NaN marks a missing value.
DepthMap read_depth(const std::filesystem::path& path, const GridPtr& grid);
/// Pixels outside the mask, or with defined[i] == 0, are written as NaN.
void write_depth(const std::filesystem::path& path, const ScalarField& depth,
                 const std::vector<std::uint8_t>* defined = nullptr);

/// First line C, then C lines of 9 coefficients.
Lighting read_lighting(const std::filesystem::path& path);
Lighting parse_lighting(std::string_view text);
void write_lighting(const std::filesystem::path& path, const Lighting& lighting);

struct ParsedConfig {
  SolverConfig solver;
  CameraModel camera;
  bool principal_point_set = false;
  std::uint64_t seed = 0;

  /// The camera, with the principal point defaulting to the raster center.
  CameraModel resolve_camera(int width, int height) const;
};

/// key=value lines; '#' starts a comment. Keys absent from the text keep
/// their value in `base`. Throws Error(ConfigError) on unknown keys,
/// malformed values, or camera=persp without a positive focal.
ParsedConfig parse_config_text(std::string_view text, const SolverConfig& base = {});
ParsedConfig parse_config(const std::filesystem::path& path, const SolverConfig& base = {});
/// Writes the camera keys only.
std::string camera_config_text(const CameraModel& camera);

/// Writes to a temporary sibling and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace sfs::io
