#pragma once

#include <cstdint>
#include <optional>

#include "guidepost/sketch/exact_sum.hpp"

namespace guidepost::sketch {

/// Running power sums S1..S4 of a numeric column. Sums are exact, so
/// sketch(A ∪ B) == sketch(A) + sketch(B) bit for bit.
class MomentSketch {
 public:
  void add(double value);
  void merge(const MomentSketch& other);

  std::uint64_t count() const noexcept { return count_; }
  /// Correctly rounded Σ b^p for p in 1..4.
  double power_sum(int p) const;
  const ExactSum& exact_power_sum(int p) const { return sums_[p - 1]; }

  static MomentSketch from_parts(std::uint64_t count, ExactSum s1, ExactSum s2, ExactSum s3, ExactSum s4);

  friend bool operator==(const MomentSketch& a, const MomentSketch& b);

 private:
  std::uint64_t count_ = 0;
  ExactSum sums_[4];
};

struct MomentMetrics {
  std::uint64_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::optional<double> skewness;
  std::optional<double> kurtosis;
};

/// Central moments reconstructed from the raw power sums. Skewness and
/// kurtosis are absent for constant columns.
MomentMetrics moments_to_metrics(const MomentSketch& sketch);

}  // namespace guidepost::sketch
