#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "guidepost/payload.hpp"

namespace guidepost {

enum class DescriptorKind {
  dispersion,
  skew,
  heavy_tails,
  outliers,
  heterogeneous_frequencies,
  linear_relationship,
};

inline constexpr DescriptorKind kAllDescriptors[] = {
    DescriptorKind::dispersion,   DescriptorKind::skew,
    DescriptorKind::heavy_tails,  DescriptorKind::outliers,
    DescriptorKind::heterogeneous_frequencies, DescriptorKind::linear_relationship,
};

enum class SortOrder { descending, ascending };

/// Ranking metric. Every descriptor has one preferred metric; linear
/// relationships additionally offer the significance-adjusted variant.
enum class Metric {
  qcd,
  abs_skewness,
  kurtosis,
  outlier_count,
  heterogeneity,
  abs_pearson,
  significance_adjusted_pearson,
};

enum class ChartType { histogram, boxplot, pareto, scatter };

struct DescriptorInfo {
  DescriptorKind kind;
  std::string_view name;
  int arity;
  Metric preferred_metric;
  SortOrder default_order;
  ChartType chart;
};

const DescriptorInfo& describe(DescriptorKind kind);
std::string_view to_string(DescriptorKind kind);
std::string_view to_string(Metric metric);
std::string_view to_string(SortOrder order);
std::string_view to_string(ChartType chart);
std::optional<DescriptorKind> parse_descriptor(std::string_view text);
std::optional<Metric> parse_metric(std::string_view text);
std::optional<SortOrder> parse_order(std::string_view text);
/// True when `metric` ranks instances of `kind`.
bool metric_applies(DescriptorKind kind, Metric metric);

/// Metric-specific extras carried next to a strength value.
struct Auxiliary {
  std::optional<double> q1, q3;
  std::optional<double> fence_low, fence_high;
  std::optional<double> p_value;
  std::optional<double> slope, intercept;
  std::optional<double> entropy;           // natural-log Shannon entropy
  std::optional<std::uint64_t> distinct;   // K used for normalization
  std::optional<std::uint64_t> sample_size;
  std::vector<double> outlier_values;      // capped, ascending
  std::vector<std::pair<std::string, std::uint64_t>> top_frequencies;
};

struct StrengthValue {
  double raw = 0.0;       // signed where meaningful (skewness, correlation)
  double strength = 0.0;  // value used for ranking and filtering
  bool approximate = false;
  Auxiliary aux;
};

/// Result of evaluating a metric on one instance: a value, or the reason the
/// instance is excluded from the instance set.
struct Evaluation {
  std::optional<StrengthValue> value;
  std::string exclusion;

  static Evaluation ok(StrengthValue v) { return {std::move(v), {}}; }
  static Evaluation excluded(std::string reason) { return {std::nullopt, std::move(reason)}; }
  bool admitted() const noexcept { return value.has_value(); }
};

// Unary numeric metrics take the non-missing cells of one column.

/// Sample quantile with linear interpolation at position (n-1)q.
/// `sorted` must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double q);

Evaluation qcd(std::span<const double> values);
Evaluation skewness(std::span<const double> values);
Evaluation kurtosis(std::span<const double> values);

/// Outlier values beyond this many are dropped from the auxiliary list.
inline constexpr std::size_t kMaxListedOutliers = 1000;
Evaluation tukey_outliers(std::span<const double> values);

/// `counts` holds the occurrence count of each distinct value.
Evaluation heterogeneity(std::span<const std::pair<std::string, std::uint64_t>> counts);

/// Pairwise-complete columns of equal length.
Evaluation pearson(std::span<const double> x, std::span<const double> y);
Evaluation significance_adjusted_pearson(std::span<const double> x, std::span<const double> y,
                                         double alpha);
/// Two-sided p-value of the t-test for zero correlation given sample r and n.
double correlation_p_value(double r, std::size_t n);
/// Zeroes |r| when the correlation test is not significant at `alpha`.
StrengthValue apply_significance(StrengthValue value, std::size_t n, double alpha);

// Visualization payloads.

Histogram histogram_payload(std::span<const double> values, std::size_t bin_count);
/// Binning over an explicit [lo, hi]; values outside land in the end bins.
Histogram histogram_payload(std::span<const double> values, std::size_t bin_count, double lo, double hi);
inline constexpr std::size_t kMaxHistogramBins = 50;
/// Sturges' rule, capped at kMaxHistogramBins.
std::size_t histogram_bins(std::uint64_t n);
BoxPlot boxplot_payload(std::span<const double> values);
Pareto pareto_payload(std::span<const std::pair<std::string, std::uint64_t>> counts,
                      std::size_t max_categories = kMaxParetoCategories);
/// Full data when it fits in `max_points`, otherwise a seeded uniform sample.
Scatter scatter_payload(std::span<const double> x, std::span<const double> y,
                        std::size_t max_points, std::uint64_t seed);

}  // namespace guidepost
