#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace guidepost {

/// Equal-width bins over [min, max]; bins are [lo, hi) except the last, which
/// is closed. A constant column yields one zero-width bin holding every value.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
};

struct BoxPlot {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  double fence_low = 0.0, fence_high = 0.0;
  std::uint64_t outlier_count = 0;
  std::vector<double> outliers;  // ascending, possibly truncated
};

inline constexpr std::size_t kMaxParetoCategories = 50;
inline constexpr const char* kParetoOtherLabel = "(other)";

/// Categories by descending count. When truncated, the tail is folded into a
/// final "(other)" bar so the cumulative line still ends at exactly 1.
struct Pareto {
  std::vector<std::string> categories;
  std::vector<std::uint64_t> counts;
  std::vector<double> cumulative;
  bool folded_tail = false;
};

struct Scatter {
  std::vector<double> x, y;
  double slope = 0.0, intercept = 0.0;
  std::uint64_t population = 0;  // pairwise-complete rows the points stand for
  bool sampled = false;
};

using VisualizationPayload = std::variant<Histogram, BoxPlot, Pareto, Scatter>;

/// Integer counts proportional to `weights` that sum exactly to `total`
/// (largest-remainder rounding; ties go to the lower index).
std::vector<std::uint64_t> apportion(const std::vector<std::uint64_t>& weights, std::uint64_t total);

}  // namespace guidepost
