#include "guidepost/sketch/moment_sketch.hpp"

#include <cmath>

#include "guidepost/error.hpp"

namespace guidepost::sketch {

void MomentSketch::add(double b) {
  ++count_;
  sums_[0].add(b);
  // Exact powers as short expansions: b^2 = h + l, b^3 = (h + l) b,
  // b^4 = h^2 + 2hl + l^2.
  const double h = b * b;
  const double l = std::fma(b, b, -h);
  sums_[1].add(h);
  sums_[1].add(l);

  const double h3 = h * b;
  sums_[2].add(h3);
  sums_[2].add(std::fma(h, b, -h3));
  const double l3 = l * b;
  sums_[2].add(l3);
  sums_[2].add(std::fma(l, b, -l3));

  const double hh = h * h;
  sums_[3].add(hh);
  sums_[3].add(std::fma(h, h, -hh));
  const double hl = h * (2.0 * l);
  sums_[3].add(hl);
  sums_[3].add(std::fma(h, 2.0 * l, -hl));
  const double ll = l * l;
  sums_[3].add(ll);
  sums_[3].add(std::fma(l, l, -ll));
}

void MomentSketch::merge(const MomentSketch& other) {
  count_ += other.count_;
  for (int p = 0; p < 4; ++p) sums_[p].add(other.sums_[p]);
}

double MomentSketch::power_sum(int p) const {
  if (p < 1 || p > 4) fail(ErrorCode::invalid_argument, "power sum order must be 1..4");
  return sums_[p - 1].value();
}

MomentSketch MomentSketch::from_parts(std::uint64_t count, ExactSum s1, ExactSum s2, ExactSum s3, ExactSum s4) {
  MomentSketch m;
  m.count_ = count;
  m.sums_[0] = std::move(s1);
  m.sums_[1] = std::move(s2);
  m.sums_[2] = std::move(s3);
  m.sums_[3] = std::move(s4);
  return m;
}

bool operator==(const MomentSketch& a, const MomentSketch& b) {
  if (a.count_ != b.count_) return false;
  for (int p = 1; p <= 4; ++p) {
    double x = a.power_sum(p), y = b.power_sum(p);
    if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
  }
  return true;
}

MomentMetrics moments_to_metrics(const MomentSketch& sketch) {
  MomentMetrics out;
  out.count = sketch.count();
  if (out.count == 0) fail(ErrorCode::invalid_argument, "moments of an empty sketch");
  const double n = static_cast<double>(out.count);
  const ExactSum& s1 = sketch.exact_power_sum(1);
  const ExactSum& s2 = sketch.exact_power_sum(2);
  const ExactSum& s3 = sketch.exact_power_sum(3);
  const ExactSum& s4 = sketch.exact_power_sum(4);
  out.mean = s1.value() / n;

  // Scaled central moments, all evaluated exactly:
  //   n^2 m2 = n S2 - S1^2
  //   n^3 m3 = n^2 S3 - 3 n S1 S2 + 2 S1^3
  //   n^4 m4 = n^3 S4 - 4 n^2 S1 S3 + 6 n S1^2 S2 - 3 S1^4
  const ExactSum s1s1 = s1 * s1;
  ExactSum c2 = s2.scaled(n);
  c2 += -s1s1;
  const double c2v = c2.value();
  out.stddev = std::sqrt(std::max(0.0, c2v)) / n;
  if (!c2.finite() || c2.is_zero() || c2v <= 0.0) return out;

  const ExactSum s1s2 = s1 * s2;
  ExactSum c3 = s3.scaled(n).scaled(n);
  c3 += -s1s2.scaled(3.0 * n);
  c3 += (s1s1 * s1).scaled(2.0);

  ExactSum c4 = s4.scaled(n).scaled(n).scaled(n);
  c4 += -(s1 * s3).scaled(4.0).scaled(n).scaled(n);
  c4 += (s1s1 * s2).scaled(6.0 * n);
  c4 += -(s1s1 * s1s1).scaled(3.0);

  out.skewness = c3.value() / (c2v * std::sqrt(c2v));
  out.kurtosis = c4.value() / (c2v * c2v);
  return out;
}

}  // namespace guidepost::sketch
