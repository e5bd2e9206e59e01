#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace sfs {

/// Rectangular raster with a boolean domain (the object mask) and a dense
/// ordinal index over the inside pixels. Rasters are row-major, (x, y) with
/// x along the width.
class MaskedGrid {
 public:
  static constexpr std::int32_t kOutside = -1;

  /// Throws Error(DomainEmpty) if no pixel is inside.
  static std::shared_ptr<const MaskedGrid> build(std::span<const std::uint8_t> mask, int width,
                                                 int height);
  static std::shared_ptr<const MaskedGrid> full(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return px_.size(); }

  bool inside(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_ &&
           ordinal_[static_cast<std::size_t>(y) * width_ + x] != kOutside;
  }
  /// Ordinal of raster pixel (x, y), or kOutside.
  std::int32_t ordinal(int x, int y) const noexcept {
    return ordinal_[static_cast<std::size_t>(y) * width_ + x];
  }
  int x(std::size_t i) const noexcept { return px_[i]; }
  int y(std::size_t i) const noexcept { return py_[i]; }

  /// Ordinal of the +x / +y neighbor, or kOutside when that neighbor leaves Ω.
  std::int32_t right(std::size_t i) const noexcept { return right_[i]; }
  std::int32_t down(std::size_t i) const noexcept { return down_[i]; }

  const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }

 private:
  MaskedGrid() = default;

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> mask_;
  std::vector<std::int32_t> ordinal_;
  std::vector<std::int32_t> px_;
  std::vector<std::int32_t> py_;
  std::vector<std::int32_t> right_;
  std::vector<std::int32_t> down_;
};

using GridPtr = std::shared_ptr<const MaskedGrid>;

/// One real value per inside pixel.
struct ScalarField {
  GridPtr grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(GridPtr g, double fill = 0.0)
      : grid(std::move(g)), values(grid->size(), fill) {}
  ScalarField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {}

  std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Two real values per inside pixel, stored as separate x / y components.
struct VectorField {
  GridPtr grid;
  std::vector<double> x;
  std::vector<double> y;

  VectorField() = default;
  explicit VectorField(GridPtr g)
      : grid(std::move(g)), x(grid->size(), 0.0), y(grid->size(), 0.0) {}

  std::size_t size() const noexcept { return x.size(); }
};

/// Forward differences, zero where the forward neighbor leaves Ω.
VectorField gradient(const ScalarField& z);
void gradient_into(const MaskedGrid& grid, std::span<const double> z, std::span<double> gx,
                   std::span<double> gy);

/// Exact negative adjoint of gradient(): <grad z, w> = -<z, div w>.
ScalarField divergence(const VectorField& w);
void divergence_into(const MaskedGrid& grid, std::span<const double> wx,
                     std::span<const double> wy, std::span<double> out);

double dot(const ScalarField& a, const ScalarField& b);
double dot(const VectorField& a, const VectorField& b);

}  // namespace sfs
