#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "guidepost/dataset.hpp"
#include "guidepost/descriptors.hpp"
#include "guidepost/payload.hpp"
#include "guidepost/sketch/bundle.hpp"

namespace guidepost {

enum class Mode { exact, approximate };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

/// One attribute tuple of a descriptor (ascending column indices).
struct Instance {
  std::vector<std::size_t> columns;
  std::string exclusion;  // empty when admissible

  bool admissible() const noexcept { return exclusion.empty(); }
};

struct InstanceSet {
  DescriptorKind kind = DescriptorKind::dispersion;
  std::vector<Instance> instances;
};

/// Every tuple the descriptor is defined on, in lexicographic order, with
/// structural and degeneracy exclusions. Metric-specific exclusions (such as
/// an undefined qcd) surface only when the metric is evaluated.
InstanceSet enumerate_instances(const Dataset& dataset, DescriptorKind kind);

inline constexpr double kDefaultAlpha = 0.05;
inline constexpr std::size_t kDefaultK = 10;

struct GuidepostQuery {
  DescriptorKind kind = DescriptorKind::dispersion;
  std::optional<Metric> metric;    // preferred metric when unset
  std::optional<SortOrder> order;  // descriptor default when unset
  std::size_t k = kDefaultK;
  std::optional<double> min, max;  // closed filter on strength
  Mode mode = Mode::approximate;
  std::optional<double> alpha;     // significance-adjusted metric only

  /// Throws invalid_argument on k = 0, min > max, a metric that does not
  /// rank this descriptor, or alpha without the significance metric.
  void validate() const;
  Metric effective_metric() const;
  SortOrder effective_order() const;
  double effective_alpha() const { return alpha.value_or(kDefaultAlpha); }
};

struct AttributeRef {
  std::size_t index = 0;
  std::string name;
};

struct Guidepost {
  std::string id;
  DescriptorKind kind = DescriptorKind::dispersion;
  Metric metric = Metric::qcd;
  std::vector<AttributeRef> tuple;
  StrengthValue value;
  VisualizationPayload payload;
  bool approximate = false;
};

/// Hex digest of (dataset fingerprint, descriptor, tuple).
std::string guidepost_id(std::string_view fingerprint, DescriptorKind kind, std::span<const std::size_t> tuple);

/// Descriptor and tuple behind a guidepost id, when the id belongs to `dataset`.
struct GuidepostRef {
  DescriptorKind kind = DescriptorKind::dispersion;
  std::vector<std::size_t> tuple;
};
std::optional<GuidepostRef> resolve_guidepost_id(const Dataset& dataset, std::string_view id);

/// Points kept in scatter payloads.
inline constexpr std::size_t kScatterMaxPoints = 1000;

/// Top-k guideposts of one descriptor. Approximate mode needs `bundle`
/// built from this dataset; exact mode ignores it.
std::vector<Guidepost> rank_guideposts(const Dataset& dataset, const sketch::SketchBundle* bundle,
                                       const GuidepostQuery& query);

/// Ranking settings applied inside neighborhoods. Neighborhoods always rank
/// linear relationships.
struct NeighborhoodQuery {
  std::size_t k = kDefaultK;
  Mode mode = Mode::approximate;
  Metric metric = Metric::abs_pearson;
  std::optional<double> min, max;
  std::optional<double> alpha;

  void validate() const;
};

struct NeighborhoodResult {
  std::string focus_id;
  GuidepostRef focus;
  std::vector<Guidepost> x_bar;   // pairs that keep the first focus attribute
  std::vector<Guidepost> y_bar;   // pairs that keep the second focus attribute
  std::vector<Guidepost> xy_bar;  // best of both
};

/// Related guideposts of a focus. A pair focus (x, y) yields pairs sharing x
/// (but not y), pairs sharing y (but not x), and the top of their union. A
/// unary focus on column x yields the pairs containing x in `x_bar` and
/// `xy_bar`, with `y_bar` empty.
NeighborhoodResult related_guideposts(const Dataset& dataset, const sketch::SketchBundle* bundle,
                                      const GuidepostRef& focus, const NeighborhoodQuery& query);

inline constexpr std::size_t kMaxExactOverviewColumns = 200;

/// Strength of every instance of a descriptor. Unary descriptors fill
/// `values` (one per entry of `columns`); linear relationships fill the
/// symmetric `matrix` over `columns` with an undefined diagonal. Excluded
/// instances are nullopt.
struct Overview {
  DescriptorKind kind = DescriptorKind::dispersion;
  Metric metric = Metric::qcd;
  Mode mode = Mode::exact;
  std::vector<AttributeRef> columns;
  std::vector<std::optional<double>> values;
  std::vector<std::vector<std::optional<double>>> matrix;
};

Overview overview(const Dataset& dataset, const sketch::SketchBundle* bundle, DescriptorKind kind, Mode mode);

}  // namespace guidepost
