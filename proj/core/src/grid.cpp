#include "sfs/grid.hpp"

#include <string>

#include "sfs/error.hpp"
#include "summation.hpp"

namespace sfs {

std::shared_ptr<const MaskedGrid> MaskedGrid::build(std::span<const std::uint8_t> mask,
                                                    int width, int height) {
  if (width <= 0 || height <= 0 ||
      mask.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::ConfigError, "mask raster size " + std::to_string(mask.size()) +
                                            " does not match " + std::to_string(width) + "x" +
                                            std::to_string(height));
  }

  std::shared_ptr<MaskedGrid> grid(new MaskedGrid());
  grid->width_ = width;
  grid->height_ = height;
  grid->mask_.assign(mask.begin(), mask.end());
  grid->ordinal_.assign(mask.size(), kOutside);

  std::int32_t next = 0;
  for (int yy = 0; yy < height; ++yy) {
    for (int xx = 0; xx < width; ++xx) {
      const std::size_t r = static_cast<std::size_t>(yy) * width + xx;
      if (mask[r] == 0) continue;
      grid->mask_[r] = 1;
      grid->ordinal_[r] = next++;
      grid->px_.push_back(xx);
      grid->py_.push_back(yy);
    }
  }
  if (next == 0) throw Error(ErrorCode::DomainEmpty, "mask has no inside pixel");

  grid->right_.resize(grid->px_.size());
  grid->down_.resize(grid->px_.size());
  for (std::size_t i = 0; i < grid->px_.size(); ++i) {
    const int xx = grid->px_[i];
    const int yy = grid->py_[i];
    grid->right_[i] = xx + 1 < width ? grid->ordinal(xx + 1, yy) : kOutside;
    grid->down_[i] = yy + 1 < height ? grid->ordinal(xx, yy + 1) : kOutside;
  }
  return grid;
}

std::shared_ptr<const MaskedGrid> MaskedGrid::full(int width, int height) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(width) * height, 1);
  return build(mask, width, height);
}

void gradient_into(const MaskedGrid& grid, std::span<const double> z, std::span<double> gx,
                   std::span<double> gy) {
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = grid.right(i);
    const auto d = grid.down(i);
    gx[i] = r != MaskedGrid::kOutside ? z[r] - z[i] : 0.0;
    gy[i] = d != MaskedGrid::kOutside ? z[d] - z[i] : 0.0;
  }
}

// Backward differences with the matching boundary rows: div = -grad^T.
void divergence_into(const MaskedGrid& grid, std::span<const double> wx,
                     std::span<const double> wy, std::span<double> out) {
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = grid.right(i);
    if (r != MaskedGrid::kOutside) {
      out[i] += wx[i];
      out[r] -= wx[i];
    }
    const auto d = grid.down(i);
    if (d != MaskedGrid::kOutside) {
      out[i] += wy[i];
      out[d] -= wy[i];
    }
  }
}

VectorField gradient(const ScalarField& z) {
  VectorField g(z.grid);
  gradient_into(*z.grid, z.values, g.x, g.y);
  return g;
}

ScalarField divergence(const VectorField& w) {
  ScalarField out(w.grid);
  divergence_into(*w.grid, w.x, w.y, out.values);
  return out;
}

double dot(const ScalarField& a, const ScalarField& b) {
  detail::NeumaierSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s.value();
}

double dot(const VectorField& a, const VectorField& b) {
  detail::NeumaierSum s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a.x[i] * b.x[i];
    s += a.y[i] * b.y[i];
  }
  return s.value();
}

}  // namespace sfs
