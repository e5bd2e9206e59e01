#include "sfs/linear.hpp"

#include <algorithm>
#include <cmath>

namespace sfs {

GradientQuadratic::GradientQuadratic(GridPtr grid)
    : grid_(std::move(grid)),
      wxx_(grid_->size(), 0.0),
      wxy_(grid_->size(), 0.0),
      wyy_(grid_->size(), 0.0),
      mass_(grid_->size(), 0.0),
      gx_(grid_->size()),
      gy_(grid_->size()) {}

void GradientQuadratic::set_isotropic(double w) {
  std::fill(wxx_.begin(), wxx_.end(), w);
  std::fill(wxy_.begin(), wxy_.end(), 0.0);
  std::fill(wyy_.begin(), wyy_.end(), w);
}

void GradientQuadratic::apply(std::span<const double> z, std::span<double> out) const {
  const std::size_t n = grid_->size();
  gradient_into(*grid_, z, gx_, gy_);
  for (std::size_t i = 0; i < n; ++i) {
    const double vx = wxx_[i] * gx_[i] + wxy_[i] * gy_[i];
    const double vy = wxy_[i] * gx_[i] + wyy_[i] * gy_[i];
    gx_[i] = vx;
    gy_[i] = vy;
  }
  // grad^T v = -div v
  divergence_into(*grid_, gx_, gy_, out);
  for (std::size_t i = 0; i < n; ++i) out[i] = mass_[i] * z[i] - out[i];
}

std::vector<double> GradientQuadratic::diagonal() const {
  const std::size_t n = grid_->size();
  std::vector<double> diag(mass_);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = grid_->right(i);
    const auto d = grid_->down(i);
    const bool has_r = r != MaskedGrid::kOutside;
    const bool has_d = d != MaskedGrid::kOutside;
    if (has_r) {
      diag[i] += wxx_[i];
      diag[r] += wxx_[i];
    }
    if (has_d) {
      diag[i] += wyy_[i];
      diag[d] += wyy_[i];
    }
    if (has_r && has_d) diag[i] += 2.0 * wxy_[i];
  }
  return diag;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

CgResult conjugate_gradient(const GradientQuadratic& op, std::span<const double> b,
                            std::span<double> x, const CgSettings& settings) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), ap(n);
  std::vector<double> inv_diag = op.diagonal();
  for (double& v : inv_diag) v = v > 0.0 ? 1.0 / v : 1.0;

  op.apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];

  const double bnorm = std::sqrt(dot(b, b));
  const double r0norm = std::sqrt(dot(r, r));
  const double scale = bnorm > 0.0 ? bnorm : r0norm;

  CgResult result;
  if (scale == 0.0) {
    result.converged = true;
    return result;
  }
  const double threshold = settings.relative_tolerance * scale;
  double rnorm = r0norm;
  if (rnorm <= threshold) {
    result.relative_residual = rnorm / scale;
    result.converged = true;
    return result;
  }

  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);

  for (int it = 0; it < settings.max_iterations; ++it) {
    op.apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    result.iterations = it + 1;
    rnorm = std::sqrt(dot(r, r));
    if (rnorm <= threshold) break;
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  // Report the true residual; the recursive one drifts on long runs.
  op.apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  rnorm = std::sqrt(dot(r, r));
  result.relative_residual = rnorm / scale;
  result.converged = rnorm <= threshold;
  return result;
}

}  // namespace sfs
