#include "guidepost/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "guidepost/error.hpp"
#include "guidepost/hashing.hpp"
#include "guidepost/sketch/estimators.hpp"

namespace guidepost {

using sketch::SketchBundle;

std::string_view to_string(Mode mode) { return mode == Mode::exact ? "exact" : "approximate"; }

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "exact") return Mode::exact;
  if (text == "approximate" || text == "approx") return Mode::approximate;
  return std::nullopt;
}

void GuidepostQuery::validate() const {
  if (k == 0) fail(ErrorCode::invalid_argument, "k must be at least 1");
  if (min && max && *min > *max) fail(ErrorCode::invalid_argument, "invalid filter range");
  if ((min && !std::isfinite(*min)) || (max && !std::isfinite(*max))) {
    fail(ErrorCode::invalid_argument, "filter bounds must be finite");
  }
  if (metric && !metric_applies(kind, *metric)) {
    fail(ErrorCode::invalid_argument,
         std::string("metric ") + std::string(to_string(*metric)) + " does not rank " + std::string(to_string(kind)));
  }
  if (alpha) {
    if (effective_metric() != Metric::significance_adjusted_pearson) {
      fail(ErrorCode::invalid_argument, "alpha requires the significance_adjusted_pearson metric");
    }
    if (!(*alpha > 0.0 && *alpha < 1.0)) fail(ErrorCode::invalid_argument, "alpha must be in (0, 1)");
  }
}

Metric GuidepostQuery::effective_metric() const { return metric.value_or(describe(kind).preferred_metric); }
SortOrder GuidepostQuery::effective_order() const { return order.value_or(describe(kind).default_order); }

void NeighborhoodQuery::validate() const {
  GuidepostQuery q;
  q.kind = DescriptorKind::linear_relationship;
  q.metric = metric;
  q.k = k;
  q.min = min;
  q.max = max;
  q.alpha = alpha;
  q.validate();
}

std::string guidepost_id(std::string_view fingerprint, DescriptorKind kind, std::span<const std::size_t> tuple) {
  Fnv1a64 h;
  h.update("guidepost-v1");
  h.update_u64(fingerprint.size());
  h.update(fingerprint);
  h.update(to_string(kind));
  h.update_u64(tuple.size());
  for (auto c : tuple) h.update_u64(c);
  return to_hex(h.digest());
}

namespace {

bool numeric_kind(DescriptorKind kind) { return kind != DescriptorKind::heterogeneous_frequencies; }

bool eligible(const ColumnMeta& m, DescriptorKind kind) {
  if (numeric_kind(kind)) return m.kind == ColumnKind::numeric;
  return m.kind == ColumnKind::categorical || m.integer_valued;
}

std::vector<std::size_t> eligible_columns(const Dataset& ds, DescriptorKind kind) {
  std::vector<std::size_t> out;
  for (const auto& m : ds.columns()) {
    if (eligible(m, kind)) out.push_back(m.index);
  }
  return out;
}

struct ColumnStats {
  std::uint64_t count = 0;
  double min = 0.0, max = 0.0;
  std::uint64_t distinct = 0;
};

ColumnStats exact_stats(const Dataset& ds, std::size_t c) {
  const auto& meta = ds.column(c);
  ColumnStats s;
  s.count = ds.rows() - meta.missing_count;
  s.distinct = meta.distinct_count;
  if (meta.kind == ColumnKind::numeric && s.count > 0) {
    const auto& col = ds.numeric(c);
    s.min = std::numeric_limits<double>::infinity();
    s.max = -s.min;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
      if (col.missing[r]) continue;
      s.min = std::min(s.min, col.values[r]);
      s.max = std::max(s.max, col.values[r]);
    }
  }
  return s;
}

ColumnStats sketch_stats(const Dataset& ds, const SketchBundle& b, std::size_t c) {
  ColumnStats s;
  s.distinct = ds.column(c).distinct_count;
  const auto& entry = b.column(c);
  if (const auto* n = entry.numeric()) {
    s.count = n->quantiles.count();
    if (s.count > 0) {
      s.min = n->quantiles.min();
      s.max = n->quantiles.max();
    }
  } else if (const auto* k = entry.categorical()) {
    s.count = k->frequencies.count();
  }
  return s;
}

std::string unary_exclusion(DescriptorKind kind, const ColumnStats& s) {
  if (s.count == 0) return "no data";
  switch (kind) {
    case DescriptorKind::dispersion:
      if (s.count < 2) return "insufficient data";
      break;
    case DescriptorKind::skew:
    case DescriptorKind::heavy_tails:
      if (s.count < 2 || s.min == s.max) return "degenerate (constant column)";
      break;
    case DescriptorKind::outliers:
      if (s.count < 4) return "insufficient data";
      break;
    case DescriptorKind::heterogeneous_frequencies:
      if (s.distinct <= 1) return "degenerate (single category)";
      break;
    case DescriptorKind::linear_relationship:
      if (s.min == s.max) return "degenerate (constant column)";
      break;
  }
  return {};
}

const SketchBundle& require_bundle(const Dataset& ds, const SketchBundle* bundle) {
  if (bundle == nullptr) fail(ErrorCode::bundle_not_ready, "bundle building");
  if (bundle->fingerprint != ds.id() || bundle->columns.size() != ds.cols()) {
    fail(ErrorCode::stale_bundle, "stale sketch bundle: built for dataset " + bundle->fingerprint);
  }
  return *bundle;
}

InstanceSet enumerate(const Dataset& ds, DescriptorKind kind, const SketchBundle* bundle) {
  InstanceSet set;
  set.kind = kind;
  const auto cols = eligible_columns(ds, kind);
  std::vector<std::string> reasons;
  reasons.reserve(cols.size());
  for (auto c : cols) {
    const auto stats = bundle ? sketch_stats(ds, *bundle, c) : exact_stats(ds, c);
    reasons.push_back(unary_exclusion(kind, stats));
  }
  if (describe(kind).arity == 1) {
    for (std::size_t i = 0; i < cols.size(); ++i) set.instances.push_back({{cols[i]}, reasons[i]});
    return set;
  }
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = i + 1; j < cols.size(); ++j) {
      set.instances.push_back({{cols[i], cols[j]}, !reasons[i].empty() ? reasons[i] : reasons[j]});
    }
  }
  return set;
}

// --- metric evaluation ---------------------------------------------------------

class Evaluator {
 public:
  Evaluator(const Dataset& ds, const SketchBundle* bundle, Mode mode, Metric metric, double alpha)
      : ds_(ds), bundle_(mode == Mode::approximate ? &require_bundle(ds, bundle) : nullptr),
        metric_(metric), alpha_(alpha), present_(ds.cols()) {}

  bool approximate() const noexcept { return bundle_ != nullptr; }
  const SketchBundle* bundle() const noexcept { return bundle_; }

  Evaluation evaluate(std::span<const std::size_t> tuple) {
    return bundle_ ? evaluate_sketch(tuple) : evaluate_exact(tuple);
  }

  VisualizationPayload payload(DescriptorKind kind, std::span<const std::size_t> tuple, const StrengthValue& v) {
    return bundle_ ? sketch_payload(kind, tuple, v) : exact_payload(kind, tuple);
  }

 private:
  const std::vector<double>& present(std::size_t c) {
    auto& slot = present_[c];
    if (!slot) slot = ds_.present_values(c);
    return *slot;
  }

  std::pair<std::vector<double>, std::vector<double>> pairwise(std::size_t a, std::size_t b) {
    const auto& x = ds_.numeric(a);
    const auto& y = ds_.numeric(b);
    std::vector<double> px, py;
    px.reserve(ds_.rows());
    py.reserve(ds_.rows());
    for (std::size_t r = 0; r < ds_.rows(); ++r) {
      if (x.missing[r] || y.missing[r]) continue;
      px.push_back(x.values[r]);
      py.push_back(y.values[r]);
    }
    return {std::move(px), std::move(py)};
  }

  Evaluation evaluate_exact(std::span<const std::size_t> tuple) {
    switch (metric_) {
      case Metric::qcd:
        return qcd(present(tuple[0]));
      case Metric::abs_skewness:
        return skewness(present(tuple[0]));
      case Metric::kurtosis:
        return kurtosis(present(tuple[0]));
      case Metric::outlier_count:
        return tukey_outliers(present(tuple[0]));
      case Metric::heterogeneity:
        return heterogeneity(ds_.value_counts(tuple[0]));
      case Metric::abs_pearson:
      case Metric::significance_adjusted_pearson: {
        const bool complete = ds_.column(tuple[0]).missing_count == 0 && ds_.column(tuple[1]).missing_count == 0;
        if (complete) return pearson_metric(present(tuple[0]), present(tuple[1]));
        auto [x, y] = pairwise(tuple[0], tuple[1]);
        return pearson_metric(x, y);
      }
    }
    fail(ErrorCode::internal, "unhandled metric");
  }

  Evaluation pearson_metric(std::span<const double> x, std::span<const double> y) const {
    if (metric_ == Metric::significance_adjusted_pearson) return significance_adjusted_pearson(x, y, alpha_);
    return pearson(x, y);
  }

  Evaluation evaluate_sketch(std::span<const std::size_t> tuple) {
    const auto& entry = bundle_->column(tuple[0]);
    if (entry.absent()) return Evaluation::excluded("no data");
    switch (metric_) {
      case Metric::qcd:
        return sketch::estimate_qcd(entry.numeric()->quantiles);
      case Metric::abs_skewness:
      case Metric::kurtosis: {
        const auto m = sketch::moments_to_metrics(entry.numeric()->moments);
        if (!m.skewness || !m.kurtosis) return Evaluation::excluded("degenerate (constant column)");
        const double raw = metric_ == Metric::kurtosis ? *m.kurtosis : *m.skewness;
        return Evaluation::ok(StrengthValue{raw, metric_ == Metric::kurtosis ? raw : std::abs(raw), true});
      }
      case Metric::outlier_count: {
        const auto& q = entry.numeric()->quantiles;
        if (q.count() < 4) return Evaluation::excluded("insufficient data");
        return Evaluation::ok(sketch::estimate_outlier_count(q));
      }
      case Metric::heterogeneity:
        return sketch_entropy(tuple[0]);
      case Metric::abs_pearson:
      case Metric::significance_adjusted_pearson:
        return sketch_pearson(tuple[0], tuple[1]);
    }
    fail(ErrorCode::internal, "unhandled metric");
  }

  Evaluation sketch_entropy(std::size_t c) {
    const auto& entry = bundle_->column(c);
    std::vector<std::string> sample;
    const sketch::HeavyHittersSketch* hh = nullptr;
    std::optional<std::uint64_t> distinct;
    if (const auto* n = entry.numeric()) {
      if (!n->frequencies) fail(ErrorCode::internal, "bundle lacks frequencies for an integer-valued column");
      hh = &*n->frequencies;
      distinct = n->distinct;
      for (const auto& e : n->sample.entries()) sample.push_back(format_real(e.value == 0.0 ? 0.0 : e.value));
    } else {
      const auto& k = *entry.categorical();
      hh = &k.frequencies;
      distinct = k.distinct;
      for (const auto& e : k.sample.entries()) sample.push_back(e.value);
    }
    // Past the cardinality cap the bundle has no exact K; the ingest-time
    // count stands in for it.
    const std::uint64_t kk = distinct.value_or(ds_.column(c).distinct_count);
    return sketch::estimate_entropy(*hh, sample, hh->count(), kk);
  }

  Evaluation sketch_pearson(std::size_t a, std::size_t b) {
    const auto& ea = bundle_->column(a);
    const auto& eb = bundle_->column(b);
    if (ea.absent() || eb.absent()) return Evaluation::excluded("no data");
    const auto& na = *ea.numeric();
    const auto& nb = *eb.numeric();
    if (!na.hyperplane || !nb.hyperplane) return Evaluation::excluded("degenerate (constant column)");
    const auto n = std::min(na.moments.count(), nb.moments.count());
    if (n < 3) return Evaluation::excluded("insufficient pairwise-complete data");
    auto v = sketch::approx_pearson(*na.hyperplane, *nb.hyperplane);
    const auto mx = sketch::moments_to_metrics(na.moments);
    const auto my = sketch::moments_to_metrics(nb.moments);
    v.aux.slope = mx.stddev > 0.0 ? v.raw * my.stddev / mx.stddev : 0.0;
    v.aux.intercept = my.mean - *v.aux.slope * mx.mean;
    if (metric_ == Metric::significance_adjusted_pearson) v = apply_significance(std::move(v), n, alpha_);
    return Evaluation::ok(std::move(v));
  }

  // --- payloads ---

  VisualizationPayload exact_payload(DescriptorKind kind, std::span<const std::size_t> tuple) {
    switch (describe(kind).chart) {
      case ChartType::histogram: {
        const auto& v = present(tuple[0]);
        return histogram_payload(v, histogram_bins(v.size()));
      }
      case ChartType::boxplot:
        return boxplot_payload(present(tuple[0]));
      case ChartType::pareto:
        return pareto_payload(ds_.value_counts(tuple[0]));
      case ChartType::scatter: {
        auto [x, y] = pairwise(tuple[0], tuple[1]);
        return scatter_payload(x, y, kScatterMaxPoints, sketch::SketchConfig{}.seed);
      }
    }
    fail(ErrorCode::internal, "unhandled chart");
  }

  VisualizationPayload sketch_payload(DescriptorKind kind, std::span<const std::size_t> tuple,
                                      const StrengthValue& value) {
    const auto& entry = bundle_->column(tuple[0]);
    switch (describe(kind).chart) {
      case ChartType::histogram: {
        const auto& n = *entry.numeric();
        std::vector<double> sample;
        for (const auto& e : n.sample.entries()) sample.push_back(e.value);
        const auto count = n.quantiles.count();
        auto h = histogram_payload(sample, histogram_bins(count), n.quantiles.min(), n.quantiles.max());
        h.counts = apportion(h.counts, count);
        return h;
      }
      case ChartType::boxplot: {
        const auto& q = entry.numeric()->quantiles;
        BoxPlot b;
        b.min = q.min();
        b.q1 = q.quantile(0.25);
        b.median = q.quantile(0.5);
        b.q3 = q.quantile(0.75);
        b.max = q.max();
        const double iqr = b.q3 - b.q1;
        b.fence_low = b.q1 - 1.5 * iqr;
        b.fence_high = b.q3 + 1.5 * iqr;
        b.outlier_count = static_cast<std::uint64_t>(value.strength);
        for (const auto& e : entry.numeric()->sample.entries()) {
          if (e.value < b.fence_low || e.value > b.fence_high) b.outliers.push_back(e.value);
        }
        std::sort(b.outliers.begin(), b.outliers.end());
        if (b.outliers.size() > kMaxListedOutliers) b.outliers.resize(kMaxListedOutliers);
        return b;
      }
      case ChartType::pareto: {
        const auto& hh = entry.numeric() ? *entry.numeric()->frequencies : entry.categorical()->frequencies;
        auto items = hh.items();
        Pareto p;
        const std::uint64_t total = hh.count();
        const std::size_t keep = std::min(items.size(), kMaxParetoCategories - 1);
        std::uint64_t running = 0;
        for (std::size_t i = 0; i < keep; ++i) {
          running += items[i].second;
          p.categories.push_back(items[i].first);
          p.counts.push_back(items[i].second);
          p.cumulative.push_back(static_cast<double>(running) / static_cast<double>(total));
        }
        if (running < total) {
          p.folded_tail = true;
          p.categories.emplace_back(kParetoOtherLabel);
          p.counts.push_back(total - running);
          p.cumulative.push_back(1.0);
        } else if (!p.cumulative.empty()) {
          p.cumulative.back() = 1.0;
        }
        return p;
      }
      case ChartType::scatter:
        return sketch_scatter(tuple[0], tuple[1], value);
    }
    fail(ErrorCode::internal, "unhandled chart");
  }

  // Reservoirs share row keys, so their row intersection is a uniform sample
  // of the pairwise-complete rows.
  Scatter sketch_scatter(std::size_t a, std::size_t b, const StrengthValue& value) {
    const auto& na = *bundle_->column(a).numeric();
    const auto& nb = *bundle_->column(b).numeric();
    const auto xs = na.sample.entries();
    const auto ys = nb.sample.entries();
    struct Point {
      std::uint64_t key, row;
      double x, y;
    };
    std::vector<Point> points;
    for (std::size_t i = 0, j = 0; i < xs.size() && j < ys.size();) {
      if (xs[i].row < ys[j].row) {
        ++i;
      } else if (ys[j].row < xs[i].row) {
        ++j;
      } else {
        points.push_back({sample_key(bundle_->config.seed, xs[i].row), xs[i].row, xs[i].value, ys[j].value});
        ++i;
        ++j;
      }
    }
    Scatter s;
    s.population = std::min(na.moments.count(), nb.moments.count());
    if (points.size() > kScatterMaxPoints) {
      std::nth_element(points.begin(), points.begin() + kScatterMaxPoints, points.end(),
                       [](const Point& p, const Point& q) { return p.key < q.key; });
      points.resize(kScatterMaxPoints);
      std::sort(points.begin(), points.end(), [](const Point& p, const Point& q) { return p.row < q.row; });
    }
    s.sampled = points.size() < s.population;
    for (const auto& p : points) {
      s.x.push_back(p.x);
      s.y.push_back(p.y);
    }
    s.slope = value.aux.slope.value_or(0.0);
    s.intercept = value.aux.intercept.value_or(0.0);
    return s;
  }

  const Dataset& ds_;
  const SketchBundle* bundle_;
  Metric metric_;
  double alpha_;
  std::vector<std::optional<std::vector<double>>> present_;
};

struct Scored {
  std::vector<std::size_t> tuple;
  StrengthValue value;
};

void sort_scored(std::vector<Scored>& v, SortOrder order) {
  std::sort(v.begin(), v.end(), [order](const Scored& a, const Scored& b) {
    if (a.value.strength != b.value.strength) {
      return order == SortOrder::descending ? a.value.strength > b.value.strength
                                            : a.value.strength < b.value.strength;
    }
    return a.tuple < b.tuple;
  });
}

bool passes(double strength, const std::optional<double>& min, const std::optional<double>& max) {
  if (!std::isfinite(strength)) return false;
  if (min && strength < *min) return false;
  if (max && strength > *max) return false;
  return true;
}

std::vector<Guidepost> materialize(const Dataset& ds, Evaluator& ev, DescriptorKind kind, Metric metric,
                                   std::vector<Scored> scored, std::size_t k) {
  if (scored.size() > k) scored.resize(k);
  std::vector<Guidepost> out;
  out.reserve(scored.size());
  for (auto& s : scored) {
    Guidepost g;
    g.id = guidepost_id(ds.id(), kind, s.tuple);
    g.kind = kind;
    g.metric = metric;
    for (auto c : s.tuple) g.tuple.push_back({c, ds.column(c).name});
    g.payload = ev.payload(kind, s.tuple, s.value);
    g.value = std::move(s.value);
    g.approximate = ev.approximate();
    out.push_back(std::move(g));
  }
  return out;
}

void validate_ref(const Dataset& ds, const GuidepostRef& ref) {
  if (ref.tuple.size() != static_cast<std::size_t>(describe(ref.kind).arity)) {
    fail(ErrorCode::invalid_argument, "focus tuple has the wrong arity");
  }
  for (std::size_t i = 0; i < ref.tuple.size(); ++i) {
    if (ref.tuple[i] >= ds.cols()) fail(ErrorCode::invalid_argument, "invalid column index in focus");
    if (i > 0 && ref.tuple[i - 1] >= ref.tuple[i]) fail(ErrorCode::invalid_argument, "focus tuple must be ascending");
  }
}

}  // namespace

InstanceSet enumerate_instances(const Dataset& dataset, DescriptorKind kind) {
  return enumerate(dataset, kind, nullptr);
}

std::optional<GuidepostRef> resolve_guidepost_id(const Dataset& dataset, std::string_view id) {
  for (auto kind : kAllDescriptors) {
    const auto cols = eligible_columns(dataset, kind);
    if (describe(kind).arity == 1) {
      for (auto c : cols) {
        const std::size_t t[] = {c};
        if (guidepost_id(dataset.id(), kind, t) == id) return GuidepostRef{kind, {c}};
      }
      continue;
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
      for (std::size_t j = i + 1; j < cols.size(); ++j) {
        const std::size_t t[] = {cols[i], cols[j]};
        if (guidepost_id(dataset.id(), kind, t) == id) return GuidepostRef{kind, {cols[i], cols[j]}};
      }
    }
  }
  return std::nullopt;
}

std::vector<Guidepost> rank_guideposts(const Dataset& dataset, const SketchBundle* bundle,
                                       const GuidepostQuery& query) {
  query.validate();
  const auto metric = query.effective_metric();
  Evaluator ev(dataset, bundle, query.mode, metric, query.effective_alpha());
  const auto set = enumerate(dataset, query.kind, ev.bundle());
  std::vector<Scored> scored;
  for (const auto& inst : set.instances) {
    if (!inst.admissible()) continue;
    auto e = ev.evaluate(inst.columns);
    if (!e.admitted() || !passes(e.value->strength, query.min, query.max)) continue;
    scored.push_back({inst.columns, std::move(*e.value)});
  }
  sort_scored(scored, query.effective_order());
  return materialize(dataset, ev, query.kind, metric, std::move(scored), query.k);
}

NeighborhoodResult related_guideposts(const Dataset& dataset, const SketchBundle* bundle,
                                      const GuidepostRef& focus, const NeighborhoodQuery& query) {
  query.validate();
  validate_ref(dataset, focus);
  Evaluator ev(dataset, bundle, query.mode, query.metric, query.alpha.value_or(kDefaultAlpha));

  NeighborhoodResult result;
  result.focus = focus;
  result.focus_id = guidepost_id(dataset.id(), focus.kind, focus.tuple);

  // The focus itself must still be admissible under its own descriptor.
  const auto own = enumerate(dataset, focus.kind, ev.bundle());
  const auto it = std::find_if(own.instances.begin(), own.instances.end(),
                               [&](const Instance& i) { return i.columns == focus.tuple; });
  if (it == own.instances.end()) fail(ErrorCode::invalid_argument, "focus is not an instance of its descriptor");
  if (!it->admissible()) fail(ErrorCode::invalid_argument, "focus tuple is no longer admissible: " + it->exclusion);

  const std::size_t x = focus.tuple[0];
  const std::optional<std::size_t> y =
      focus.tuple.size() > 1 ? std::optional<std::size_t>(focus.tuple[1]) : std::nullopt;

  std::vector<Scored> xs, ys;
  const auto pairs = enumerate(dataset, DescriptorKind::linear_relationship, ev.bundle());
  for (const auto& inst : pairs.instances) {
    const auto& t = inst.columns;
    const bool has_x = t[0] == x || t[1] == x;
    const bool has_y = y && (t[0] == *y || t[1] == *y);
    if (has_x == has_y || !inst.admissible()) continue;
    auto e = ev.evaluate(t);
    if (!e.admitted() || !passes(e.value->strength, query.min, query.max)) continue;
    (has_x ? xs : ys).push_back({t, std::move(*e.value)});
  }
  std::vector<Scored> both = xs;
  both.insert(both.end(), ys.begin(), ys.end());
  sort_scored(xs, SortOrder::descending);
  sort_scored(ys, SortOrder::descending);
  sort_scored(both, SortOrder::descending);

  const auto kind = DescriptorKind::linear_relationship;
  result.x_bar = materialize(dataset, ev, kind, query.metric, std::move(xs), query.k);
  result.y_bar = materialize(dataset, ev, kind, query.metric, std::move(ys), query.k);
  result.xy_bar = materialize(dataset, ev, kind, query.metric, std::move(both), query.k);
  return result;
}

Overview overview(const Dataset& dataset, const SketchBundle* bundle, DescriptorKind kind, Mode mode) {
  const auto metric = describe(kind).preferred_metric;
  const auto cols = eligible_columns(dataset, kind);
  const bool pairwise = describe(kind).arity == 2;
  if (pairwise && mode == Mode::exact && cols.size() > kMaxExactOverviewColumns) {
    fail(ErrorCode::invalid_argument, "exact overview is limited to " + std::to_string(kMaxExactOverviewColumns) +
                                          " columns; use approximate mode");
  }
  Evaluator ev(dataset, bundle, mode, metric, kDefaultAlpha);
  Overview out;
  out.kind = kind;
  out.metric = metric;
  out.mode = mode;
  for (auto c : cols) out.columns.push_back({c, dataset.column(c).name});

  const auto set = enumerate(dataset, kind, ev.bundle());
  auto strength = [&](const Instance& inst) -> std::optional<double> {
    if (!inst.admissible()) return std::nullopt;
    auto e = ev.evaluate(inst.columns);
    if (!e.admitted() || !std::isfinite(e.value->strength)) return std::nullopt;
    return e.value->strength;
  };
  if (!pairwise) {
    for (const auto& inst : set.instances) out.values.push_back(strength(inst));
    return out;
  }
  const std::size_t m = cols.size();
  out.matrix.assign(m, std::vector<std::optional<double>>(m));
  std::size_t next = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto v = strength(set.instances[next++]);
      out.matrix[i][j] = v;
      out.matrix[j][i] = v;
    }
  }
  return out;
}

}  // namespace guidepost
