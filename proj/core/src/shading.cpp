#include "sfs/shading.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sfs/error.hpp"

namespace sfs {

Albedo Albedo::white(const GridPtr& grid, std::size_t num_channels) {
  Albedo a;
  a.channels.assign(num_channels, ScalarField(grid, 1.0));
  return a;
}

ShVector sh_basis(const Eigen::Vector3d& n) {
  const double norm = n.norm();
  if (!(std::abs(norm - 1.0) <= 1e-9)) {
    throw Error(ErrorCode::NotUnitNormal, "normal has length " + std::to_string(norm));
  }
  return sh_basis_unchecked(n);
}

Image render(const NormalField& normals, const Albedo& albedo, const Lighting& lighting) {
  const std::size_t channels = lighting.num_channels();
  Image img;
  img.channels.reserve(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    ScalarField out(normals.grid);
    const ShVector& l = lighting.channels[c];
    const ScalarField& rho = albedo.channels[c];
    for (std::size_t i = 0; i < normals.size(); ++i) {
      out[i] = rho[i] * l.dot(sh_basis_unchecked(normals.n[i]));
    }
    img.channels.push_back(std::move(out));
  }
  return img;
}

PdeCoefficients pde_coefficients(const VectorField& theta, const PixelGeometry& geom,
                                 const Albedo& albedo, const Lighting& lighting) {
  const std::size_t channels = lighting.num_channels();
  const std::size_t n = theta.size();
  PdeCoefficients out;
  out.a.assign(channels, VectorField(theta.grid));
  out.b.assign(channels, ScalarField(theta.grid));

  for (std::size_t i = 0; i < n; ++i) {
    const double f = geom.f[i];
    const double xt = geom.xt[i];
    const double yt = geom.yt[i];
    const double zx = theta.x[i];
    const double zy = theta.y[i];
    const double d = std::max(area_element(f, xt, yt, zx, zy), kAreaFloor);
    const double d2 = d * d;
    const double w = -1.0 - xt * zx - yt * zy;

    // Coefficients of l3..l9 in b.
    const double k3 = -1.0 / d;
    const double k5 = f * f * zx * zy / d2;
    const double k6 = f * zx * w / d2;
    const double k7 = f * zy * w / d2;
    const double k8 = f * f * (zx * zx - zy * zy) / d2;
    const double k9 = 3.0 * w * w / d2 - 1.0;

    for (std::size_t c = 0; c < channels; ++c) {
      const ShVector& l = lighting.channels[c];
      const double rho = albedo.channels[c][i];
      out.a[c].x[i] = rho / d * (f * l[0] - xt * l[2]);
      out.a[c].y[i] = rho / d * (f * l[1] - yt * l[2]);
      out.b[c][i] = rho * (l[2] * k3 + l[3] + l[4] * k5 + l[5] * k6 + l[6] * k7 +
                           l[7] * k8 + l[8] * k9);
    }
  }
  return out;
}

LightingEstimate estimate_lighting(const Image& image, const NormalField& normals,
                                   const Albedo& albedo) {
  LightingEstimate est;
  const std::size_t channels = image.num_channels();
  est.lighting.channels.resize(channels);
  est.condition.resize(channels);

  for (std::size_t c = 0; c < channels; ++c) {
    Eigen::Matrix<double, 9, 9> gram = Eigen::Matrix<double, 9, 9>::Zero();
    ShVector rhs = ShVector::Zero();
    std::size_t usable = 0;
    const ScalarField& rho = albedo.channels[c];
    const ScalarField& intensity = image.channels[c];
    for (std::size_t i = 0; i < normals.size(); ++i) {
      if (rho[i] == 0.0) continue;
      ++usable;
      const ShVector row = rho[i] * sh_basis(normals.n[i]);
      gram.selfadjointView<Eigen::Lower>().rankUpdate(row);
      rhs += intensity[i] * row;
    }
    if (usable < 9) {
      throw Error(ErrorCode::InsufficientData,
                  "channel " + std::to_string(c) + " has " + std::to_string(usable) +
                      " usable pixels, need 9");
    }
    gram = gram.selfadjointView<Eigen::Lower>();

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> eig(gram);
    const ShVector& ev = eig.eigenvalues();
    const double top = ev.maxCoeff();
    const double cutoff = top * 1e-12;
    ShVector coeffs = eig.eigenvectors().transpose() * rhs;
    for (int k = 0; k < 9; ++k) coeffs[k] = ev[k] > cutoff ? coeffs[k] / ev[k] : 0.0;
    est.lighting.channels[c] = eig.eigenvectors() * coeffs;

    const double bottom = ev.minCoeff();
    est.condition[c] = bottom > cutoff ? top / bottom : std::numeric_limits<double>::infinity();
    if (bottom <= cutoff) est.rank_deficient = true;
  }
  return est;
}

}  // namespace sfs
