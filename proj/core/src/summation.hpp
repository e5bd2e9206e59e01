#pragma once

#include <cmath>

namespace sfs::detail {

// Neumaier compensated summation. Callers feed terms in pixel-index order so
// the result is reproducible bit for bit.
class NeumaierSum {
 public:
  NeumaierSum& operator+=(double term) noexcept {
    const double t = sum_ + term;
    if (std::abs(sum_) >= std::abs(term)) {
      comp_ += (sum_ - t) + term;
    } else {
      comp_ += (term - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace sfs::detail
