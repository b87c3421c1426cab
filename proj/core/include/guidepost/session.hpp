#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "guidepost/dataset.hpp"
#include "guidepost/engine.hpp"

namespace guidepost {

inline constexpr int kSessionVersion = 1;
inline constexpr std::size_t kMaxFocusHistory = 50;

struct Bookmark {
  std::string id;
  std::string created_at;  // caller-supplied timestamp, e.g. ISO 8601 UTC

  friend bool operator==(const Bookmark&, const Bookmark&) = default;
};

/// Per-descriptor carousel settings.
struct QuerySettings {
  std::optional<Metric> metric;
  std::optional<SortOrder> order;
  std::size_t k = kDefaultK;
  std::optional<double> min, max;
  Mode mode = Mode::approximate;
  std::optional<double> alpha;

  GuidepostQuery to_query(DescriptorKind kind) const;
  friend bool operator==(const QuerySettings&, const QuerySettings&) = default;
};

struct SessionState {
  int version = kSessionVersion;
  std::string dataset_id;
  std::vector<Bookmark> bookmarks;  // insertion order
  std::optional<std::string> focus;
  std::vector<std::string> focus_history;  // oldest first, capped
  std::map<DescriptorKind, QuerySettings> settings;

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

/// Adds `id` unless already bookmarked. Throws not_found when the id does
/// not resolve against `dataset`.
void bookmark(SessionState& session, const Dataset& dataset, std::string_view id, std::string created_at);
void unbookmark(SessionState& session, std::string_view id);
/// Sets or clears the focus; a new focus is appended to the history.
void set_focus(SessionState& session, const Dataset& dataset, std::optional<std::string_view> id);
void set_settings(SessionState& session, DescriptorKind kind, QuerySettings settings);

/// Checks that the session belongs to `dataset` and that every referenced
/// guidepost id resolves.
void validate_session(const SessionState& session, const Dataset& dataset);

/// Canonical JSON text. load_session(save_session(s)) == s, and saving a
/// loaded session reproduces the input bytes when they were canonical.
std::string save_session(const SessionState& session);
/// Throws corrupt on malformed or unknown content.
SessionState load_session(std::string_view text);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace guidepost
