#include "guidepost/sketch/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "guidepost/error.hpp"

namespace guidepost::sketch {

StrengthValue approx_pearson(const HyperplaneSketch& x, const HyperplaneSketch& y) {
  const auto h = hamming_distance(x, y);
  const double estimate = std::cos(std::numbers::pi * static_cast<double>(h) / static_cast<double>(x.k));
  StrengthValue v{estimate, std::abs(estimate), true};
  return v;
}

Evaluation estimate_qcd(const QuantileSketch& sketch) {
  if (sketch.count() < 2) return Evaluation::excluded("insufficient data");
  const double q1 = sketch.quantile(0.25);
  const double q3 = sketch.quantile(0.75);
  if (q3 + q1 == 0.0) return Evaluation::excluded("qcd undefined");
  const double d = (q3 - q1) / (q3 + q1);
  StrengthValue v{d, d, true};
  v.aux.q1 = q1;
  v.aux.q3 = q3;
  return Evaluation::ok(std::move(v));
}

StrengthValue estimate_outlier_count(const QuantileSketch& sketch) {
  if (sketch.empty()) fail(ErrorCode::invalid_argument, "empty quantile sketch");
  const double n = static_cast<double>(sketch.count());
  const double q1 = sketch.quantile(0.25);
  const double q3 = sketch.quantile(0.75);
  const double iqr = q3 - q1;
  const double lo = q1 - 1.5 * iqr;
  const double hi = q3 + 1.5 * iqr;
  const double inliers = sketch.rank(hi) - sketch.rank_below(lo);
  const double outliers = std::clamp(std::round(n - inliers), 0.0, n);
  StrengthValue v{outliers, outliers, true};
  v.aux.q1 = q1;
  v.aux.q3 = q3;
  v.aux.fence_low = lo;
  v.aux.fence_high = hi;
  return v;
}

Evaluation estimate_entropy(const HeavyHittersSketch& frequencies, std::span<const std::string> sample,
                            std::uint64_t n, std::uint64_t distinct) {
  if (distinct <= 1) return Evaluation::excluded("degenerate (single category)");
  if (n == 0) fail(ErrorCode::invalid_argument, "entropy of an empty column");
  const double total = static_cast<double>(n);
  const auto tracked = frequencies.items();

  double tracked_mass = 0.0;
  for (const auto& [value, c] : tracked) tracked_mass += static_cast<double>(c) / total;
  const double residual = std::max(0.0, 1.0 - tracked_mass);

  std::map<std::string_view, std::uint64_t> tail;
  std::uint64_t tail_size = 0;
  for (const auto& s : sample) {
    if (frequencies.contains(s)) continue;
    ++tail[s];
    ++tail_size;
  }
  const std::uint64_t untracked_distinct = distinct > tracked.size() ? distinct - tracked.size() : 0;

  double h = 0.0;
  if (residual > 0.0 && (tail_size > 0 || untracked_distinct > 0)) {
    for (const auto& [value, c] : tracked) {
      const double p = static_cast<double>(c) / total;
      h -= p * std::log(p);
    }
    double tail_entropy = 0.0;
    if (tail_size > 0) {
      const double m = static_cast<double>(tail_size);
      for (const auto& [value, c] : tail) {
        const double q = static_cast<double>(c) / m;
        tail_entropy -= q * std::log(q);
      }
      tail_entropy += static_cast<double>(tail.size() - 1) / (2.0 * m);
      const double support = static_cast<double>(std::max<std::uint64_t>(untracked_distinct, tail.size()));
      tail_entropy = std::min(tail_entropy, std::log(support));
    } else {
      tail_entropy = std::log(static_cast<double>(untracked_distinct));
    }
    h += -residual * std::log(residual) + residual * tail_entropy;
  } else {
    // Every value is tracked: renormalize the counters.
    double mass = 0.0;
    for (const auto& kv : tracked) mass += static_cast<double>(kv.second);
    for (const auto& [value, c] : tracked) {
      const double p = static_cast<double>(c) / mass;
      h -= p * std::log(p);
    }
  }

  const double hn = std::clamp(h / std::log(static_cast<double>(distinct)), 0.0, 1.0);
  StrengthValue v{hn, 1.0 - hn, true};
  v.aux.entropy = h;
  v.aux.distinct = distinct;
  v.aux.sample_size = tail_size;
  auto top = tracked;
  if (top.size() > 10) top.resize(10);
  v.aux.top_frequencies = std::move(top);
  return Evaluation::ok(std::move(v));
}

}  // namespace guidepost::sketch
