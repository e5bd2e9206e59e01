#include "sfs/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "sfs/error.hpp"

namespace sfs::io {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void format_error(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::FormatError, path.string() + ": " + what);
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) format_error(path, "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Netpbm-style header tokenizer: whitespace-separated tokens, '#' comments.
class HeaderReader {
 public:
  HeaderReader(const std::string& bytes, const fs::path& path) : bytes_(bytes), path_(path) {}

  std::string token() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) format_error(path_, "truncated header");
    return bytes_.substr(start, pos_ - start);
  }

  long integer() {
    const std::string t = token();
    long v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) format_error(path_, "bad integer '" + t + "'");
    return v;
  }

  double real() {
    const std::string t = token();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) format_error(path_, "bad number '" + t + "'");
    return v;
  }

  // Exactly one whitespace byte separates the header from the payload.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      format_error(path_, "truncated header");
    }
    return pos_ + 1;
  }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0x0000FF00u) | ((v << 8) & 0x00FF0000u) | (v << 24);
}

Raster parse_pfm(const std::string& bytes, const fs::path& path) {
  HeaderReader h(bytes, path);
  const std::string magic = h.token();
  Raster r;
  if (magic == "Pf") {
    r.channels = 1;
  } else if (magic == "PF") {
    r.channels = 3;
  } else {
    format_error(path, "not a PFM file");
  }
  const long w = h.integer();
  const long hh = h.integer();
  if (w <= 0 || hh <= 0 || w > (1 << 16) || hh > (1 << 16)) format_error(path, "bad dimensions");
  const double scale = h.real();
  if (scale == 0.0 || !std::isfinite(scale)) format_error(path, "bad scale");
  const bool little = scale < 0.0;
  const std::size_t offset = h.payload_offset();

  r.width = static_cast<int>(w);
  r.height = static_cast<int>(hh);
  const std::size_t count = static_cast<std::size_t>(w) * hh * r.channels;
  if (bytes.size() - offset < count * 4) format_error(path, "truncated payload");
  r.data.resize(count);

  const bool swap = little != (std::endian::native == std::endian::little);
  const std::size_t row = static_cast<std::size_t>(w) * r.channels;
  for (long y = 0; y < hh; ++y) {
    // File rows run bottom-up.
    const char* src = bytes.data() + offset + static_cast<std::size_t>(hh - 1 - y) * row * 4;
    for (std::size_t k = 0; k < row; ++k) {
      std::uint32_t u;
      std::memcpy(&u, src + 4 * k, 4);
      if (swap) u = byteswap32(u);
      r.data[static_cast<std::size_t>(y) * row + k] = std::bit_cast<float>(u);
    }
  }
  return r;
}

Raster parse_pnm(const std::string& bytes, const fs::path& path) {
  HeaderReader h(bytes, path);
  const std::string magic = h.token();
  Raster r;
  if (magic == "P5") {
    r.channels = 1;
  } else if (magic == "P6") {
    r.channels = 3;
  } else {
    format_error(path, "unsupported netpbm variant '" + magic + "'");
  }
  const long w = h.integer();
  const long hh = h.integer();
  const long maxval = h.integer();
  if (w <= 0 || hh <= 0 || w > (1 << 16) || hh > (1 << 16)) format_error(path, "bad dimensions");
  if (maxval <= 0 || maxval > 65535) format_error(path, "bad maxval");
  const std::size_t offset = h.payload_offset();

  r.width = static_cast<int>(w);
  r.height = static_cast<int>(hh);
  const std::size_t count = static_cast<std::size_t>(w) * hh * r.channels;
  const std::size_t bpp = maxval < 256 ? 1 : 2;
  if (bytes.size() - offset < count * bpp) format_error(path, "truncated payload");
  r.data.resize(count);
  const auto* src = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  for (std::size_t k = 0; k < count; ++k) {
    // 16-bit netpbm samples are most significant byte first.
    const unsigned v = bpp == 1 ? src[k] : (static_cast<unsigned>(src[2 * k]) << 8) | src[2 * k + 1];
    r.data[k] = static_cast<float>(static_cast<double>(v) / static_cast<double>(maxval));
  }
  return r;
}

void check_dims(const Raster& r, const MaskedGrid& grid, const fs::path& path) {
  if (r.width != grid.width() || r.height != grid.height()) {
    format_error(path, "raster is " + std::to_string(r.width) + "x" + std::to_string(r.height) +
                           ", mask is " + std::to_string(grid.width()) + "x" +
                           std::to_string(grid.height()));
  }
}

// Shortest text that parses back to the same double.
std::string float_text(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::FormatError, path.string() + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::FormatError, path.string() + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::FormatError, path.string() + ": rename failed: " + ec.message());
}

Raster read_pfm(const fs::path& path) { return parse_pfm(read_bytes(path), path); }

void write_pfm(const fs::path& path, const Raster& raster) {
  if (raster.channels != 1 && raster.channels != 3) {
    throw Error(ErrorCode::FormatError, path.string() + ": PFM holds 1 or 3 channels");
  }
  std::string out = (raster.channels == 1 ? "Pf\n" : "PF\n") + std::to_string(raster.width) +
                    " " + std::to_string(raster.height) + "\n-1.0\n";
  const std::size_t row = static_cast<std::size_t>(raster.width) * raster.channels;
  const std::size_t header = out.size();
  out.resize(header + row * raster.height * 4);
  const bool swap = std::endian::native != std::endian::little;
  for (int y = 0; y < raster.height; ++y) {
    char* dst = out.data() + header + static_cast<std::size_t>(raster.height - 1 - y) * row * 4;
    for (std::size_t k = 0; k < row; ++k) {
      std::uint32_t u = std::bit_cast<std::uint32_t>(raster.data[static_cast<std::size_t>(y) * row + k]);
      if (swap) u = byteswap32(u);
      std::memcpy(dst + 4 * k, &u, 4);
    }
  }
  write_file_atomic(path, out);
}

Raster read_raster(const fs::path& path) {
  const std::string bytes = read_bytes(path);
  if (bytes.size() < 2) format_error(path, "truncated header");
  if (bytes[0] == 'P' && (bytes[1] == 'f' || bytes[1] == 'F')) return parse_pfm(bytes, path);
  if (bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) return parse_pnm(bytes, path);
  format_error(path, "unrecognized raster format");
}

void write_pgm(const fs::path& path, const Raster& raster) {
  std::string out = "P5\n" + std::to_string(raster.width) + " " +
                    std::to_string(raster.height) + "\n255\n";
  for (int y = 0; y < raster.height; ++y) {
    for (int x = 0; x < raster.width; ++x) {
      const double v = std::clamp(static_cast<double>(raster.at(x, y)), 0.0, 1.0);
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
  }
  write_file_atomic(path, out);
}

GridPtr read_mask(const fs::path& path) {
  const Raster r = read_raster(path);
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(r.width) * r.height, 0);
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      const float v = r.at(x, y, 0);
      mask[static_cast<std::size_t>(y) * r.width + x] = std::isfinite(v) && v != 0.0f ? 1 : 0;
    }
  }
  return MaskedGrid::build(mask, r.width, r.height);
}

void write_mask(const fs::path& path, const MaskedGrid& grid) {
  Raster r{grid.width(), grid.height(), 1,
           std::vector<float>(static_cast<std::size_t>(grid.width()) * grid.height(), 0.0f)};
  for (std::size_t i = 0; i < grid.size(); ++i) r.at(grid.x(i), grid.y(i)) = 1.0f;
  write_pgm(path, r);
}

Image read_image(const fs::path& path, const GridPtr& grid, std::size_t expected_channels) {
  const Raster r = read_raster(path);
  check_dims(r, *grid, path);
  if (expected_channels != 0 && static_cast<std::size_t>(r.channels) != expected_channels) {
    format_error(path, "image has " + std::to_string(r.channels) + " channels, expected " +
                           std::to_string(expected_channels));
  }
  Image img;
  for (int c = 0; c < r.channels; ++c) {
    ScalarField ch(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) {
      ch[i] = r.at(grid->x(i), grid->y(i), c);
      if (!std::isfinite(ch[i])) format_error(path, "non-finite intensity inside the mask");
    }
    img.channels.push_back(std::move(ch));
  }
  return img;
}

void write_image(const fs::path& path, const Image& image) {
  const MaskedGrid& grid = *image.grid();
  const int channels = static_cast<int>(image.num_channels());
  Raster r{grid.width(), grid.height(), channels,
           std::vector<float>(static_cast<std::size_t>(grid.width()) * grid.height() * channels,
                              0.0f)};
  for (int c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      r.at(grid.x(i), grid.y(i), c) = static_cast<float>(image.channels[c][i]);
    }
  }
  write_pfm(path, r);
}

DepthMap read_depth(const fs::path& path, const GridPtr& grid) {
  const Raster r = read_raster(path);
  check_dims(r, *grid, path);
  if (r.channels != 1) format_error(path, "depth must have one channel");
  DepthMap d{ScalarField(grid), std::vector<std::uint8_t>(grid->size(), 0)};
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const float v = r.at(grid->x(i), grid->y(i));
    if (std::isnan(v)) continue;
    if (!std::isfinite(v)) format_error(path, "infinite depth value");
    d.values[i] = v;
    d.defined[i] = 1;
  }
  return d;
}

void write_depth(const fs::path& path, const ScalarField& depth,
                 const std::vector<std::uint8_t>* defined) {
  const MaskedGrid& grid = *depth.grid;
  Raster r{grid.width(), grid.height(), 1,
           std::vector<float>(static_cast<std::size_t>(grid.width()) * grid.height(),
                              std::numeric_limits<float>::quiet_NaN())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (defined && !(*defined)[i]) continue;
    r.at(grid.x(i), grid.y(i)) = static_cast<float>(depth[i]);
  }
  write_pfm(path, r);
}

Lighting parse_lighting(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (!line.empty()) return true;
    }
    return false;
  };
  auto fail = [](const std::string& what) -> Lighting {
    throw Error(ErrorCode::FormatError, "lighting: " + what);
  };

  if (!next_line()) return fail("empty file");
  std::istringstream head(line);
  long channels = 0;
  std::string extra;
  if (!(head >> channels) || (head >> extra) || channels < 1) {
    return fail("first line must be the channel count");
  }

  Lighting l;
  for (long c = 0; c < channels; ++c) {
    if (!next_line()) return fail("expected " + std::to_string(channels) + " coefficient lines");
    std::istringstream row(line);
    std::vector<double> values;
    std::string tok;
    while (row >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size() || !std::isfinite(v)) {
        return fail("bad coefficient '" + tok + "'");
      }
      values.push_back(v);
    }
    if (values.size() != 9) {
      return fail("line " + std::to_string(c + 2) + " has " + std::to_string(values.size()) +
                  " coefficients, expected 9");
    }
    ShVector v;
    for (int k = 0; k < 9; ++k) v[k] = values[k];
    l.channels.push_back(v);
  }
  if (next_line()) return fail("trailing content after coefficients");
  return l;
}

Lighting read_lighting(const fs::path& path) {
  try {
    return parse_lighting(read_bytes(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::FormatError) format_error(path, e.what());
    throw;
  }
}

void write_lighting(const fs::path& path, const Lighting& lighting) {
  std::string out = std::to_string(lighting.num_channels()) + "\n";
  for (const ShVector& l : lighting.channels) {
    for (int k = 0; k < 9; ++k) {
      if (k) out += ' ';
      out += float_text(l[k]);
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

CameraModel ParsedConfig::resolve_camera(int width, int height) const {
  if (!camera.is_perspective() || principal_point_set) return camera;
  return CameraModel::perspective(camera.focal, 0.5 * (width - 1), 0.5 * (height - 1));
}

ParsedConfig parse_config_text(std::string_view text, const SolverConfig& base) {
  ParsedConfig cfg;
  cfg.solver = base;
  bool perspective = false;
  bool focal_set = false;
  bool cx_set = false;
  bool cy_set = false;
  double focal = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    auto bad = [&]() {
      return Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": bad value '" +
                                               value + "' for " + key);
    };
    auto as_real = [&]() {
      char* end = nullptr;
      const double v = std::strtod(value.c_str(), &end);
      if (value.empty() || end != value.c_str() + value.size() || !std::isfinite(v)) throw bad();
      return v;
    };
    auto as_int = [&]() {
      long long v = 0;
      const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || p != value.data() + value.size()) throw bad();
      return v;
    };
    auto as_bool = [&]() {
      if (value == "1" || value == "true" || value == "on") return true;
      if (value == "0" || value == "false" || value == "off") return false;
      throw bad();
    };

    SolverConfig& s = cfg.solver;
    if (key == "lambda") s.weights.lambda = as_real();
    else if (key == "mu") s.weights.mu = as_real();
    else if (key == "nu") s.weights.nu = as_real();
    else if (key == "beta0") s.beta0 = as_real();
    else if (key == "tol") s.tolerance = as_real();
    else if (key == "max_iter") s.max_iterations = static_cast<int>(as_int());
    else if (key == "newton_max_iter") s.newton.max_iterations = static_cast<int>(as_int());
    else if (key == "newton_tol") s.newton.gradient_tolerance = as_real();
    else if (key == "cg_max_iter") s.cg.max_iterations = static_cast<int>(as_int());
    else if (key == "cg_tol") s.cg.relative_tolerance = as_real();
    else if (key == "tau") s.penalty.tau = as_real();
    else if (key == "ratio") s.penalty.ratio = as_real();
    else if (key == "adaptive_beta") s.penalty.adaptive = as_bool();
    else if (key == "gauge_fix") s.gauge_fix = as_bool();
    else if (key == "check_descent") s.check_descent = as_bool();
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int());
    else if (key == "camera") {
      if (value == "ortho") perspective = false;
      else if (value == "persp") perspective = true;
      else throw bad();
    } else if (key == "focal") {
      focal = as_real();
      focal_set = true;
    } else if (key == "cx") {
      cx = as_real();
      cx_set = true;
    } else if (key == "cy") {
      cy = as_real();
      cy_set = true;
    } else {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }

  if (perspective) {
    if (!focal_set) throw Error(ErrorCode::ConfigError, "camera=persp requires focal");
    if (cx_set != cy_set) throw Error(ErrorCode::ConfigError, "set both cx and cy, or neither");
    cfg.camera = CameraModel::perspective(focal, cx, cy);
    cfg.principal_point_set = cx_set;
  }
  cfg.solver.validate();
  return cfg;
}

ParsedConfig parse_config(const fs::path& path, const SolverConfig& base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), base);
}

std::string camera_config_text(const CameraModel& camera) {
  if (!camera.is_perspective()) return "camera=ortho\n";
  return "camera=persp\nfocal=" + float_text(camera.focal) + "\ncx=" + float_text(camera.cx) +
         "\ncy=" + float_text(camera.cy) + "\n";
}

}  // namespace sfs::io
