#pragma once

#include <span>
#include <vector>

#include "sfs/grid.hpp"

namespace sfs {

/// The symmetric positive semi-definite operator
///   A z = mass .* z + grad^T W grad z
/// with a 2x2 symmetric weight W per pixel. Both the ADMM depth update
/// (W = beta I, mass = 2 mu 1_prior) and the frozen-coefficient baseline
/// (W = sum_c a^c a^c^T) have this form.
class GradientQuadratic {
 public:
  explicit GradientQuadratic(GridPtr grid);

  void set_isotropic(double w);
  std::vector<double>& wxx() { return wxx_; }
  std::vector<double>& wxy() { return wxy_; }
  std::vector<double>& wyy() { return wyy_; }
  std::vector<double>& mass() { return mass_; }

  void apply(std::span<const double> z, std::span<double> out) const;
  std::vector<double> diagonal() const;
  const MaskedGrid& grid() const { return *grid_; }

 private:
  GridPtr grid_;
  std::vector<double> wxx_, wxy_, wyy_, mass_;
  mutable std::vector<double> gx_, gy_;
};

struct CgSettings {
  int max_iterations = 2000;
  double relative_tolerance = 1e-8;
};

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradient, warm-started at x. Stops when
/// |b - A x| <= tol * |b| (tol * |b - A x0| when b = 0).
CgResult conjugate_gradient(const GradientQuadratic& op, std::span<const double> b,
                            std::span<double> x, const CgSettings& settings);

}  // namespace sfs
