#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "sfs/grid.hpp"

namespace sfs::test {

// Random mask of the given size with roughly `fill` of the pixels inside;
// never empty.
inline GridPtr random_grid(std::mt19937_64& rng, int w, int h, double fill = 0.7) {
  std::bernoulli_distribution inside(fill);
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h);
  for (auto& m : mask) m = inside(rng) ? 1 : 0;
  mask[0] = 1;
  return MaskedGrid::build(mask, w, h);
}

inline ScalarField random_scalar(std::mt19937_64& rng, const GridPtr& g, double lo = -1.0,
                                 double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ScalarField f(g);
  for (double& v : f.values) v = u(rng);
  return f;
}

inline VectorField random_vector(std::mt19937_64& rng, const GridPtr& g, double lo = -1.0,
                                 double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  VectorField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.x[i] = u(rng);
    f.y[i] = u(rng);
  }
  return f;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("sfs_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace sfs::test
