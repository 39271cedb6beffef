#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace comac::detail {

/// Neumaier compensated sum, accumulated strictly in index order.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and standard error of the mean.
inline MeanAndError mean_and_error(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return {};
  CompensatedSum s1;
  for (double v : values) s1.add(v);
  const double mean = s1.value() / static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  CompensatedSum s2;
  for (double v : values) s2.add((v - mean) * (v - mean));
  const double variance = s2.value() / static_cast<double>(n - 1);
  return {mean, std::sqrt(variance / static_cast<double>(n))};
}

}  // namespace comac::detail
