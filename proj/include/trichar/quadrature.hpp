#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace trichar {

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Composite Simpson rule on a uniform grid with spacing h; needs an odd
/// number of samples (>= 3). Falls back to the trapezoid rule on the last
/// interval when the count is even.
double simpson(std::span<const double> values, double h);

/// Uniform grid of `count` points covering [a, b] inclusive.
std::vector<double> uniform_grid(double a, double b, std::size_t count);

}  // namespace trichar
