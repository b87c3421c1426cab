#pragma once

#include <span>
#include <vector>

namespace guidepost::sketch {

/// Error-free floating-point accumulator. The running total is kept as a
/// non-overlapping expansion (increasing magnitude), so the represented sum
/// is exact regardless of insertion order and `value()` is the correctly
/// rounded double. Merging two sums is therefore exact and associative.
class ExactSum {
 public:
  ExactSum() = default;
  explicit ExactSum(double x) { add(x); }

  void add(double x);
  void add(const ExactSum& other);

  /// Correctly rounded total. NaN/inf once a non-finite term was added.
  double value() const;
  bool finite() const noexcept { return finite_; }
  bool is_zero() const noexcept { return finite_ && parts_.empty(); }

  /// Exact product with a double / another expansion.
  ExactSum scaled(double factor) const;
  ExactSum operator*(const ExactSum& other) const;
  ExactSum operator-() const;
  ExactSum& operator+=(const ExactSum& other) {
    add(other);
    return *this;
  }

  /// Same total, in a representation determined by the value alone.
  ExactSum canonical() const;

  std::span<const double> parts() const noexcept { return parts_; }
  static ExactSum from_parts(std::span<const double> parts, bool finite = true);

 private:
  std::vector<double> parts_;
  bool finite_ = true;
  double special_ = 0.0;  // plain sum of non-finite terms
};

inline ExactSum operator+(ExactSum a, const ExactSum& b) {
  a.add(b);
  return a;
}

}  // namespace guidepost::sketch
