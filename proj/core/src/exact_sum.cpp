#include "guidepost/sketch/exact_sum.hpp"

#include <cmath>
#include <limits>

namespace guidepost::sketch {

namespace {

inline void two_product(double a, double b, double& hi, double& lo) {
  hi = a * b;
  lo = std::fma(a, b, -hi);
}

}  // namespace

void ExactSum::add(double x) {
  if (!std::isfinite(x)) {
    finite_ = false;
    special_ += x;
    return;
  }
  // Shewchuk grow-expansion, as in Python's math.fsum.
  std::size_t used = 0;
  for (double y : parts_) {
    if (std::abs(x) < std::abs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) parts_[used++] = lo;
    x = hi;
  }
  parts_.resize(used);
  if (!std::isfinite(x)) {
    finite_ = false;
    special_ += x;
    return;
  }
  if (x != 0.0) parts_.push_back(x);
}

void ExactSum::add(const ExactSum& other) {
  if (&other == this) {
    ExactSum copy = other;
    add(copy);
    return;
  }
  for (double p : other.parts_) add(p);
  if (!other.finite_) {
    finite_ = false;
    special_ += other.special_;
  }
}

double ExactSum::value() const {
  if (!finite_) {
    return std::isnan(special_) ? std::numeric_limits<double>::quiet_NaN() : special_;
  }
  std::size_t n = parts_.size();
  if (n == 0) return 0.0;
  double hi = parts_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = parts_[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  // Round half-even correction when the remaining tail pushes past a tie.
  if (n > 0 && ((lo < 0.0 && parts_[n - 1] < 0.0) || (lo > 0.0 && parts_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    const double yr = x - hi;
    if (y == yr) hi = x;
  }
  return hi;
}

ExactSum ExactSum::scaled(double factor) const {
  ExactSum out;
  if (!finite_ || !std::isfinite(factor)) {
    out.finite_ = false;
    out.special_ = value() * factor;
    return out;
  }
  for (double p : parts_) {
    double hi, lo;
    two_product(p, factor, hi, lo);
    out.add(hi);
    out.add(lo);
  }
  return out;
}

ExactSum ExactSum::operator*(const ExactSum& other) const {
  ExactSum out;
  if (!finite_ || !other.finite_) {
    out.finite_ = false;
    out.special_ = value() * other.value();
    return out;
  }
  for (double q : other.parts_) out.add(scaled(q));
  return out;
}

ExactSum ExactSum::operator-() const {
  ExactSum out = *this;
  for (double& p : out.parts_) p = -p;
  out.special_ = -special_;
  return out;
}

ExactSum ExactSum::canonical() const {
  if (!finite_) return *this;
  // Peel off correctly rounded leading terms until nothing remains.
  std::vector<double> terms;
  ExactSum rest = *this;
  while (!rest.is_zero()) {
    const double head = rest.value();
    terms.push_back(head);
    rest.add(-head);
  }
  ExactSum out;
  out.parts_.assign(terms.rbegin(), terms.rend());
  return out;
}

ExactSum ExactSum::from_parts(std::span<const double> parts, bool finite) {
  ExactSum out;
  for (double p : parts) out.add(p);
  if (!finite && out.finite_) {
    out.finite_ = false;
    out.special_ = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace guidepost::sketch
