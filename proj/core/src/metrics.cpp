#include "sfs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>

#include "summation.hpp"

namespace sfs {

double channel_rmse(const ScalarField& a, const ScalarField& b) {
  detail::NeumaierSum s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = a[i] - b[i];
    s += r * r;
  }
  return std::sqrt(s.value() / static_cast<double>(a.size()));
}

double reprojection_rmse(const Image& image, const Image& reprojection) {
  detail::NeumaierSum s;
  std::size_t count = 0;
  for (std::size_t c = 0; c < image.num_channels(); ++c) {
    const ScalarField& a = image.channels[c];
    const ScalarField& b = reprojection.channels[c];
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double r = a[i] - b[i];
      s += r * r;
    }
    count += a.size();
  }
  return std::sqrt(s.value() / static_cast<double>(count));
}

double normal_mae(const NormalField& estimated, const NormalField& truth) {
  detail::NeumaierSum s;
  for (std::size_t i = 0; i < estimated.size(); ++i) {
    const double c = std::clamp(estimated.n[i].dot(truth.n[i]), -1.0, 1.0);
    s += std::acos(c);
  }
  return s.value() / static_cast<double>(estimated.size()) * 180.0 / std::numbers::pi;
}

void print_report(std::ostream& os, const EvalReport& r) {
  const auto flags = os.flags();
  os << std::fixed << std::setprecision(6);
  os << std::left << std::setw(18) << "pixels" << r.pixels << '\n';
  for (std::size_t c = 0; c < r.rmse_per_channel.size(); ++c) {
    os << std::left << std::setw(18) << ("rmse[" + std::to_string(c) + "]")
       << r.rmse_per_channel[c] << '\n';
  }
  os << std::left << std::setw(18) << "rmse" << r.rmse << '\n';
  os << std::left << std::setw(18) << "mae_degrees" << r.mae_degrees << '\n';
  os << std::left << std::setw(18) << "primal_residual" << r.primal_residual << '\n';
  os.flags(flags);
}

void print_report_porcelain(std::ostream& os, const EvalReport& r) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "pixels=" << r.pixels << '\n';
  for (std::size_t c = 0; c < r.rmse_per_channel.size(); ++c) {
    os << "rmse_" << c << '=' << r.rmse_per_channel[c] << '\n';
  }
  os << "rmse=" << r.rmse << '\n';
  os << "mae_degrees=" << r.mae_degrees << '\n';
  os << "primal_residual=" << r.primal_residual << '\n';
  os.flags(flags);
  os.precision(prec);
}

}  // namespace sfs
