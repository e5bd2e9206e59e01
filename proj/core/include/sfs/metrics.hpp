#pragma once

#include <iosfwd>
#include <vector>

#include "sfs/camera.hpp"
#include "sfs/shading.hpp"

namespace sfs {

struct EvalReport {
  std::vector<double> rmse_per_channel;
  double rmse = 0.0;       // pooled over channels and pixels
  double mae_degrees = 0.0;
  double primal_residual = 0.0;
  std::size_t pixels = 0;
};

/// sqrt of the mean squared difference over all pixels and channels.
double reprojection_rmse(const Image& image, const Image& reprojection);
double channel_rmse(const ScalarField& a, const ScalarField& b);

/// Mean angle between paired normals, in degrees.
double normal_mae(const NormalField& estimated, const NormalField& truth);

/// Aligned human-readable report.
void print_report(std::ostream& os, const EvalReport& r);
/// key=value lines.
void print_report_porcelain(std::ostream& os, const EvalReport& r);

}  // namespace sfs
