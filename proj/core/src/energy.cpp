#include "sfs/energy.hpp"

#include <algorithm>
#include <cmath>

#include "sfs/error.hpp"
#include "summation.hpp"

namespace sfs {

void Weights::validate() const {
  if (!(lambda >= 0.0) || !(mu >= 0.0) || !(nu >= 0.0)) {
    throw Error(ErrorCode::ConfigError, "weights must be nonnegative");
  }
  if (lambda == 0.0 && mu == 0.0 && nu == 0.0) {
    throw Error(ErrorCode::ConfigError, "at least one of lambda, mu, nu must be positive");
  }
}

std::size_t PriorData::count() const {
  return static_cast<std::size_t>(std::count(defined.begin(), defined.end(), 1));
}

PriorData PriorData::none(const GridPtr& grid) {
  return PriorData{ScalarField(grid), std::vector<std::uint8_t>(grid->size(), 0)};
}

namespace {

Eigen::Vector3d floored_normal(double f, double xt, double yt, double tx, double ty) {
  const Eigen::Vector3d u = raw_normal(f, xt, yt, tx, ty);
  return u / std::max(u.norm(), kAreaFloor);
}

}  // namespace

double shading_energy(const VectorField& theta, const PixelGeometry& geom, const Albedo& albedo,
                      const Lighting& lighting, const Image& image) {
  detail::NeumaierSum sum;
  const std::size_t channels = lighting.num_channels();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const ShVector h = sh_basis_unchecked(
        floored_normal(geom.f[i], geom.xt[i], geom.yt[i], theta.x[i], theta.y[i]));
    for (std::size_t c = 0; c < channels; ++c) {
      const double r = albedo.channels[c][i] * lighting.channels[c].dot(h) - image.channels[c][i];
      sum += r * r;
    }
  }
  return sum.value();
}

double prior_energy(const ScalarField& z, const PriorData& prior) {
  detail::NeumaierSum sum;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!prior.defined[i]) continue;
    const double r = z[i] - prior.z0[i];
    sum += r * r;
  }
  return sum.value();
}

double smoothness_energy(const VectorField& theta, const PixelGeometry& geom) {
  detail::NeumaierSum sum;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    sum += area_element(geom.f[i], geom.xt[i], geom.yt[i], theta.x[i], theta.y[i]);
  }
  return sum.value();
}

double model_objective(const VectorField& theta, const ScalarField& z, const Weights& w,
                       const ModelInputs& in) {
  double value = 0.0;
  if (w.lambda > 0.0) {
    value += w.lambda * shading_energy(theta, in.geom, in.albedo, in.lighting, in.image);
  }
  if (w.mu > 0.0 && in.prior) value += w.mu * prior_energy(z, *in.prior);
  if (w.nu > 0.0) value += w.nu * smoothness_energy(theta, in.geom);
  return value;
}

double lagrangian_value(const VectorField& theta, const ScalarField& z, const VectorField& psi,
                        const Weights& w, double beta, const ModelInputs& in) {
  const VectorField gz = gradient(z);
  detail::NeumaierSum pairing;
  detail::NeumaierSum penalty;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double rx = gz.x[i] - theta.x[i];
    const double ry = gz.y[i] - theta.y[i];
    pairing += psi.x[i] * rx;
    pairing += psi.y[i] * ry;
    penalty += rx * rx;
    penalty += ry * ry;
  }
  return model_objective(theta, z, w, in) + pairing.value() + 0.5 * beta * penalty.value();
}

PixelEvaluation pixel_objective(const Eigen::Vector2d& theta, const PixelContext& ctx,
                                bool with_hessian) {
  PixelEvaluation out;
  const double tx = theta.x();
  const double ty = theta.y();

  // u = B theta + c with c = (0, 0, -1).
  Eigen::Matrix<double, 3, 2> B;
  B << ctx.f, 0.0, 0.0, ctx.f, -ctx.xt, -ctx.yt;
  const Eigen::Vector3d u = raw_normal(ctx.f, ctx.xt, ctx.yt, tx, ty);
  const double unorm = u.norm();
  out.floored = !(unorm >= kAreaFloor);
  const double d = out.floored ? kAreaFloor : unorm;
  const Eigen::Vector3d n = u / d;

  // dn/dtheta; with the floor active d is a constant.
  const Eigen::Matrix<double, 3, 2> dn =
      out.floored ? Eigen::Matrix<double, 3, 2>(B / d)
                  : Eigen::Matrix<double, 3, 2>((B - n * (n.transpose() * B)) / d);

  const Eigen::Vector2d delta = ctx.g - theta;
  out.value = -ctx.psi.dot(theta) + 0.5 * ctx.beta * delta.squaredNorm();
  out.gradient = -ctx.psi - ctx.beta * delta;
  if (with_hessian) out.hessian = ctx.beta * Eigen::Matrix2d::Identity();

  if (ctx.lambda > 0.0) {
    const ShVector h = sh_basis_unchecked(n);
    Eigen::Matrix<double, 9, 3> dh = Eigen::Matrix<double, 9, 3>::Zero();
    dh(0, 0) = 1.0;
    dh(1, 1) = 1.0;
    dh(2, 2) = 1.0;
    dh(4, 0) = n.y();
    dh(4, 1) = n.x();
    dh(5, 0) = n.z();
    dh(5, 2) = n.x();
    dh(6, 1) = n.z();
    dh(6, 2) = n.y();
    dh(7, 0) = 2.0 * n.x();
    dh(7, 1) = -2.0 * n.y();
    dh(8, 2) = 6.0 * n.z();
    const Eigen::Matrix<double, 9, 2> dh_dtheta = dh * dn;

    double shading = 0.0;
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    Eigen::Matrix2d gn = Eigen::Matrix2d::Zero();
    for (std::size_t c = 0; c < ctx.lighting.size(); ++c) {
      const ShVector& l = ctx.lighting[c];
      const double rho = ctx.rho[c];
      const double r = rho * l.dot(h) - ctx.intensity[c];
      const Eigen::Vector2d jr = rho * (dh_dtheta.transpose() * l);
      shading += r * r;
      grad += 2.0 * r * jr;
      if (with_hessian) gn += 2.0 * jr * jr.transpose();
    }
    out.value += ctx.lambda * shading;
    out.gradient += ctx.lambda * grad;
    if (with_hessian) out.hessian += ctx.lambda * gn;
  }

  if (ctx.nu > 0.0) {
    out.value += ctx.nu * d;
    if (!out.floored) {
      const Eigen::Vector2d btn = B.transpose() * n;
      out.gradient += ctx.nu * btn;
      if (with_hessian) {
        out.hessian += ctx.nu * (B.transpose() * B - btn * btn.transpose()) / d;
      }
    }
  }
  return out;
}

}  // namespace sfs
