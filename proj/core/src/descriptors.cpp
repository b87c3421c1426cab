#include "guidepost/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "guidepost/error.hpp"
#include "guidepost/hashing.hpp"

namespace guidepost {

namespace {

constexpr DescriptorInfo kInfo[] = {
    {DescriptorKind::dispersion, "dispersion", 1, Metric::qcd, SortOrder::ascending, ChartType::histogram},
    {DescriptorKind::skew, "skew", 1, Metric::abs_skewness, SortOrder::descending, ChartType::histogram},
    {DescriptorKind::heavy_tails, "heavy_tails", 1, Metric::kurtosis, SortOrder::descending,
     ChartType::histogram},
    {DescriptorKind::outliers, "outliers", 1, Metric::outlier_count, SortOrder::descending,
     ChartType::boxplot},
    {DescriptorKind::heterogeneous_frequencies, "heterogeneous_frequencies", 1, Metric::heterogeneity,
     SortOrder::descending, ChartType::pareto},
    {DescriptorKind::linear_relationship, "linear_relationship", 2, Metric::abs_pearson,
     SortOrder::descending, ChartType::scatter},
};

constexpr std::pair<Metric, std::string_view> kMetricNames[] = {
    {Metric::qcd, "qcd"},
    {Metric::abs_skewness, "abs_skewness"},
    {Metric::kurtosis, "kurtosis"},
    {Metric::outlier_count, "outlier_count"},
    {Metric::heterogeneity, "heterogeneity"},
    {Metric::abs_pearson, "abs_pearson"},
    {Metric::significance_adjusted_pearson, "significance_adjusted_pearson"},
};

bool is_constant(std::span<const double> v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo == *hi;
}

// Two-pass mean: the correction pass recovers bits a plain sum loses when the
// deviations are small next to the mean.
double mean_of(std::span<const double> v) {
  const long double n = static_cast<long double>(v.size());
  long double s = 0.0L;
  for (double x : v) s += x;
  const long double mu = s / n;
  long double c = 0.0L;
  for (double x : v) c += static_cast<long double>(x) - mu;
  return static_cast<double>(mu + c / n);
}

struct CentralMoments {
  double mean, m2, m3, m4;
};

CentralMoments central_moments(std::span<const double> v) {
  const double mu = mean_of(v);
  long double s2 = 0.0L, s3 = 0.0L, s4 = 0.0L;
  for (double x : v) {
    const long double d = static_cast<long double>(x) - mu;
    const long double d2 = d * d;
    s2 += d2;
    s3 += d2 * d;
    s4 += d2 * d2;
  }
  const long double n = static_cast<long double>(v.size());
  return {mu, static_cast<double>(s2 / n), static_cast<double>(s3 / n), static_cast<double>(s4 / n)};
}

std::vector<double> sorted_copy(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return s;
}

std::vector<std::pair<std::string, std::uint64_t>> by_descending_count(
    std::span<const std::pair<std::string, std::uint64_t>> counts) {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  for (const auto& c : counts) {
    if (c.second > 0) out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return out;
}

}  // namespace

const DescriptorInfo& describe(DescriptorKind kind) { return kInfo[static_cast<int>(kind)]; }

std::string_view to_string(DescriptorKind kind) { return describe(kind).name; }

std::string_view to_string(Metric metric) {
  for (const auto& [m, name] : kMetricNames) {
    if (m == metric) return name;
  }
  return "unknown";
}

std::string_view to_string(SortOrder order) {
  return order == SortOrder::descending ? "descending" : "ascending";
}

std::string_view to_string(ChartType chart) {
  switch (chart) {
    case ChartType::histogram: return "histogram";
    case ChartType::boxplot: return "boxplot";
    case ChartType::pareto: return "pareto";
    case ChartType::scatter: return "scatter";
  }
  return "histogram";
}

std::optional<DescriptorKind> parse_descriptor(std::string_view text) {
  for (const auto& info : kInfo) {
    if (info.name == text) return info.kind;
  }
  return std::nullopt;
}

std::optional<Metric> parse_metric(std::string_view text) {
  for (const auto& [m, name] : kMetricNames) {
    if (name == text) return m;
  }
  return std::nullopt;
}

std::optional<SortOrder> parse_order(std::string_view text) {
  if (text == "descending" || text == "desc") return SortOrder::descending;
  if (text == "ascending" || text == "asc") return SortOrder::ascending;
  return std::nullopt;
}

bool metric_applies(DescriptorKind kind, Metric metric) {
  if (describe(kind).preferred_metric == metric) return true;
  return kind == DescriptorKind::linear_relationship && metric == Metric::significance_adjusted_pearson;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) fail(ErrorCode::invalid_argument, "quantile of empty column");
  const double pos = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Evaluation qcd(std::span<const double> values) {
  if (values.size() < 2) return Evaluation::excluded("insufficient data");
  auto s = sorted_copy(values);
  const double q1 = quantile_sorted(s, 0.25);
  const double q3 = quantile_sorted(s, 0.75);
  if (q3 + q1 == 0.0) return Evaluation::excluded("qcd undefined");
  const double d = (q3 - q1) / (q3 + q1);
  StrengthValue v{d, d};
  v.aux.q1 = q1;
  v.aux.q3 = q3;
  return Evaluation::ok(std::move(v));
}

Evaluation skewness(std::span<const double> values) {
  if (values.size() < 2 || is_constant(values)) {
    return Evaluation::excluded("degenerate (constant column)");
  }
  auto m = central_moments(values);
  const double g1 = m.m3 / (m.m2 * std::sqrt(m.m2));
  return Evaluation::ok(StrengthValue{g1, std::abs(g1)});
}

Evaluation kurtosis(std::span<const double> values) {
  if (values.size() < 2 || is_constant(values)) {
    return Evaluation::excluded("degenerate (constant column)");
  }
  auto m = central_moments(values);
  const double k = m.m4 / (m.m2 * m.m2);
  return Evaluation::ok(StrengthValue{k, k});
}

Evaluation tukey_outliers(std::span<const double> values) {
  if (values.size() < 4) return Evaluation::excluded("insufficient data");
  auto s = sorted_copy(values);
  const double q1 = quantile_sorted(s, 0.25);
  const double q3 = quantile_sorted(s, 0.75);
  const double iqr = q3 - q1;
  const double lo = q1 - 1.5 * iqr;
  const double hi = q3 + 1.5 * iqr;
  StrengthValue v;
  std::uint64_t count = 0;
  for (double x : s) {
    if (x < lo || x > hi) {
      ++count;
      if (v.aux.outlier_values.size() < kMaxListedOutliers) v.aux.outlier_values.push_back(x);
    }
  }
  v.raw = v.strength = static_cast<double>(count);
  v.aux.q1 = q1;
  v.aux.q3 = q3;
  v.aux.fence_low = lo;
  v.aux.fence_high = hi;
  return Evaluation::ok(std::move(v));
}

Evaluation heterogeneity(std::span<const std::pair<std::string, std::uint64_t>> counts) {
  std::uint64_t total = 0;
  std::uint64_t distinct = 0;
  for (const auto& [label, c] : counts) {
    total += c;
    if (c > 0) ++distinct;
  }
  if (distinct <= 1) return Evaluation::excluded("degenerate (single category)");
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  const double hn = std::clamp(h / std::log(static_cast<double>(distinct)), 0.0, 1.0);
  StrengthValue v{hn, 1.0 - hn};
  v.aux.entropy = h;
  v.aux.distinct = distinct;
  auto ranked = by_descending_count(counts);
  if (ranked.size() > 10) ranked.resize(10);
  v.aux.top_frequencies = std::move(ranked);
  return Evaluation::ok(std::move(v));
}

Evaluation pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorCode::invalid_argument, "pearson: columns differ in length");
  if (x.size() < 3) return Evaluation::excluded("insufficient pairwise-complete data");
  if (is_constant(x) || is_constant(y)) return Evaluation::excluded("degenerate (constant column)");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  long double lxx = 0.0L, lyy = 0.0L, lxy = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double dx = static_cast<long double>(x[i]) - mx;
    const long double dy = static_cast<long double>(y[i]) - my;
    lxx += dx * dx;
    lyy += dy * dy;
    lxy += dx * dy;
  }
  const double r = std::clamp(static_cast<double>(lxy / std::sqrt(lxx * lyy)), -1.0, 1.0);
  const double sxy = static_cast<double>(lxy), sxx = static_cast<double>(lxx);
  StrengthValue v{r, std::abs(r)};
  v.aux.slope = sxy / sxx;
  v.aux.intercept = my - *v.aux.slope * mx;
  v.aux.sample_size = x.size();
  return Evaluation::ok(std::move(v));
}

double correlation_p_value(double r, std::size_t n) {
  if (n <= 2) fail(ErrorCode::invalid_argument, "correlation test needs n > 2");
  const double ar = std::abs(r);
  if (ar >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = ar * std::sqrt(df / (1.0 - ar * ar));
  boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

StrengthValue apply_significance(StrengthValue value, std::size_t n, double alpha) {
  const double p = correlation_p_value(value.raw, n);
  value.aux.p_value = p;
  value.strength = p <= alpha ? std::abs(value.raw) : 0.0;
  return value;
}

Evaluation significance_adjusted_pearson(std::span<const double> x, std::span<const double> y,
                                         double alpha) {
  auto e = pearson(x, y);
  if (!e.admitted()) return e;
  return Evaluation::ok(apply_significance(std::move(*e.value), x.size(), alpha));
}

// --- payloads ------------------------------------------------------------------

std::vector<std::uint64_t> apportion(const std::vector<std::uint64_t>& weights, std::uint64_t total) {
  std::vector<std::uint64_t> out(weights.size(), 0);
  unsigned __int128 sum = 0;
  for (auto w : weights) sum += w;
  if (sum == 0) return out;
  std::vector<std::pair<unsigned __int128, std::size_t>> remainders;
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    unsigned __int128 scaled = static_cast<unsigned __int128>(weights[i]) * total;
    out[i] = static_cast<std::uint64_t>(scaled / sum);
    assigned += out[i];
    remainders.emplace_back(scaled % sum, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t j = 0; assigned < total; ++j, ++assigned) ++out[remainders[j].second];
  return out;
}

Histogram histogram_payload(std::span<const double> values, std::size_t bin_count) {
  if (values.empty()) fail(ErrorCode::invalid_argument, "histogram of empty column");
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  return histogram_payload(values, bin_count, *lo_it, *hi_it);
}

Histogram histogram_payload(std::span<const double> values, std::size_t bin_count, double lo, double hi) {
  if (bin_count == 0) fail(ErrorCode::invalid_argument, "histogram needs at least one bin");
  if (!(lo <= hi)) fail(ErrorCode::invalid_argument, "histogram range is empty");
  Histogram h;
  if (lo == hi) {
    h.edges = {lo, hi};
    h.counts = {values.size()};
    return h;
  }
  const double width = (hi - lo) / static_cast<double>(bin_count);
  h.edges.resize(bin_count + 1);
  for (std::size_t i = 0; i < bin_count; ++i) h.edges[i] = lo + static_cast<double>(i) * width;
  h.edges[bin_count] = hi;
  h.counts.assign(bin_count, 0);
  for (double v : values) {
    const double pos = std::clamp(std::floor((v - lo) / width), 0.0, static_cast<double>(bin_count - 1));
    auto idx = static_cast<std::size_t>(pos);
    while (idx > 0 && v < h.edges[idx]) --idx;
    while (idx + 1 < bin_count && v >= h.edges[idx + 1]) ++idx;
    ++h.counts[idx];
  }
  return h;
}

std::size_t histogram_bins(std::uint64_t n) {
  if (n <= 1) return 1;
  const auto sturges = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
  return std::min(sturges, kMaxHistogramBins);
}

BoxPlot boxplot_payload(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::invalid_argument, "box plot of empty column");
  auto s = sorted_copy(values);
  BoxPlot b;
  b.min = s.front();
  b.max = s.back();
  b.q1 = quantile_sorted(s, 0.25);
  b.median = quantile_sorted(s, 0.5);
  b.q3 = quantile_sorted(s, 0.75);
  const double iqr = b.q3 - b.q1;
  b.fence_low = b.q1 - 1.5 * iqr;
  b.fence_high = b.q3 + 1.5 * iqr;
  for (double x : s) {
    if (x < b.fence_low || x > b.fence_high) {
      ++b.outlier_count;
      if (b.outliers.size() < kMaxListedOutliers) b.outliers.push_back(x);
    }
  }
  return b;
}

Pareto pareto_payload(std::span<const std::pair<std::string, std::uint64_t>> counts,
                      std::size_t max_categories) {
  auto ranked = by_descending_count(counts);
  Pareto p;
  std::uint64_t total = 0;
  for (const auto& r : ranked) total += r.second;
  if (total == 0) return p;
  const std::size_t keep =
      ranked.size() > max_categories && max_categories > 1 ? max_categories - 1 : ranked.size();
  std::uint64_t running = 0;
  for (std::size_t i = 0; i < keep; ++i) {
    running += ranked[i].second;
    p.categories.push_back(ranked[i].first);
    p.counts.push_back(ranked[i].second);
    p.cumulative.push_back(static_cast<double>(running) / static_cast<double>(total));
  }
  if (keep < ranked.size()) {
    p.folded_tail = true;
    p.categories.emplace_back(kParetoOtherLabel);
    p.counts.push_back(total - running);
    p.cumulative.push_back(1.0);
  }
  return p;
}

Scatter scatter_payload(std::span<const double> x, std::span<const double> y, std::size_t max_points,
                        std::uint64_t seed) {
  if (x.size() != y.size()) fail(ErrorCode::invalid_argument, "scatter: columns differ in length");
  Scatter s;
  s.population = x.size();
  if (x.empty()) return s;
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  s.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  s.intercept = my - s.slope * mx;

  if (x.size() <= max_points) {
    s.x.assign(x.begin(), x.end());
    s.y.assign(y.begin(), y.end());
    return s;
  }
  s.sampled = true;
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) keyed[i] = {sample_key(seed, i), i};
  std::nth_element(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(max_points), keyed.end());
  keyed.resize(max_points);
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  for (const auto& [key, i] : keyed) {
    s.x.push_back(x[i]);
    s.y.push_back(y[i]);
  }
  return s;
}

}  // namespace guidepost
