#include "guidepost/session.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <set>

#include <nlohmann/json.hpp>

#include "guidepost/error.hpp"

namespace guidepost {

using ojson = nlohmann::ordered_json;

GuidepostQuery QuerySettings::to_query(DescriptorKind kind) const {
  GuidepostQuery q;
  q.kind = kind;
  q.metric = metric;
  q.order = order;
  q.k = k;
  q.min = min;
  q.max = max;
  q.mode = mode;
  q.alpha = alpha;
  return q;
}

void bookmark(SessionState& session, const Dataset& dataset, std::string_view id, std::string created_at) {
  if (session.dataset_id != dataset.id()) fail(ErrorCode::invalid_argument, "session belongs to another dataset");
  if (!resolve_guidepost_id(dataset, id)) fail(ErrorCode::not_found, "unknown guidepost id " + std::string(id));
  const bool present = std::any_of(session.bookmarks.begin(), session.bookmarks.end(),
                                    [&](const Bookmark& b) { return b.id == id; });
  if (!present) session.bookmarks.push_back({std::string(id), std::move(created_at)});
}

void unbookmark(SessionState& session, std::string_view id) {
  std::erase_if(session.bookmarks, [&](const Bookmark& b) { return b.id == id; });
}

void set_focus(SessionState& session, const Dataset& dataset, std::optional<std::string_view> id) {
  if (!id) {
    session.focus.reset();
    return;
  }
  if (session.dataset_id != dataset.id()) fail(ErrorCode::invalid_argument, "session belongs to another dataset");
  if (!resolve_guidepost_id(dataset, *id)) fail(ErrorCode::not_found, "unknown guidepost id " + std::string(*id));
  session.focus = std::string(*id);
  session.focus_history.emplace_back(*id);
  if (session.focus_history.size() > kMaxFocusHistory) {
    session.focus_history.erase(session.focus_history.begin(),
                                session.focus_history.end() - static_cast<std::ptrdiff_t>(kMaxFocusHistory));
  }
}

void set_settings(SessionState& session, DescriptorKind kind, QuerySettings settings) {
  settings.to_query(kind).validate();
  session.settings[kind] = std::move(settings);
}

void validate_session(const SessionState& session, const Dataset& dataset) {
  if (session.dataset_id != dataset.id()) fail(ErrorCode::invalid_argument, "session belongs to another dataset");
  auto check = [&](const std::string& id) {
    if (!resolve_guidepost_id(dataset, id)) fail(ErrorCode::not_found, "unknown guidepost id " + id);
  };
  for (const auto& b : session.bookmarks) check(b.id);
  if (session.focus) check(*session.focus);
  for (const auto& id : session.focus_history) check(id);
}

namespace {

template <class T>
ojson optional_json(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

[[noreturn]] void corrupt(const std::string& what) { fail(ErrorCode::corrupt, "corrupt session: " + what); }

void expect_keys(const ojson& obj, std::initializer_list<std::string_view> keys, const char* where) {
  if (!obj.is_object()) corrupt(std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      corrupt("unknown field " + key + " in " + where);
    }
  }
  for (auto key : keys) {
    if (!obj.contains(std::string(key))) corrupt("missing field " + std::string(key) + " in " + where);
  }
}

std::string get_string(const ojson& v, const char* what) {
  if (!v.is_string()) corrupt(std::string(what) + " must be a string");
  return v.get<std::string>();
}

std::optional<double> get_optional_number(const ojson& v, const char* what) {
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) corrupt(std::string(what) + " must be a number or null");
  return v.get<double>();
}

}  // namespace

std::string save_session(const SessionState& s) {
  ojson doc;
  doc["version"] = s.version;
  doc["dataset_id"] = s.dataset_id;
  doc["bookmarks"] = ojson::array();
  for (const auto& b : s.bookmarks) doc["bookmarks"].push_back({{"id", b.id}, {"created_at", b.created_at}});
  doc["focus"] = optional_json(s.focus);
  doc["focus_history"] = s.focus_history;
  ojson settings = ojson::object();
  for (const auto& [kind, q] : s.settings) {
    ojson e;
    e["metric"] = q.metric ? ojson(to_string(*q.metric)) : ojson(nullptr);
    e["order"] = q.order ? ojson(to_string(*q.order)) : ojson(nullptr);
    e["k"] = q.k;
    e["min"] = optional_json(q.min);
    e["max"] = optional_json(q.max);
    e["mode"] = to_string(q.mode);
    e["alpha"] = optional_json(q.alpha);
    settings[std::string(to_string(kind))] = std::move(e);
  }
  doc["settings"] = std::move(settings);
  return doc.dump();
}

SessionState load_session(std::string_view text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::exception& e) {
    corrupt(e.what());
  }
  expect_keys(doc, {"version", "dataset_id", "bookmarks", "focus", "focus_history", "settings"}, "session");
  SessionState s;
  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != kSessionVersion) {
    corrupt("unsupported version");
  }
  s.dataset_id = get_string(doc["dataset_id"], "dataset_id");
  if (!doc["bookmarks"].is_array()) corrupt("bookmarks must be an array");
  std::set<std::string> seen;
  for (const auto& b : doc["bookmarks"]) {
    expect_keys(b, {"id", "created_at"}, "bookmark");
    Bookmark bm{get_string(b["id"], "bookmark id"), get_string(b["created_at"], "created_at")};
    if (!seen.insert(bm.id).second) corrupt("duplicate bookmark " + bm.id);
    s.bookmarks.push_back(std::move(bm));
  }
  if (!doc["focus"].is_null()) s.focus = get_string(doc["focus"], "focus");
  if (!doc["focus_history"].is_array()) corrupt("focus_history must be an array");
  for (const auto& f : doc["focus_history"]) s.focus_history.push_back(get_string(f, "focus_history entry"));
  if (s.focus_history.size() > kMaxFocusHistory) corrupt("focus_history too long");
  if (!doc["settings"].is_object()) corrupt("settings must be an object");
  for (const auto& [name, e] : doc["settings"].items()) {
    const auto kind = parse_descriptor(name);
    if (!kind) corrupt("unknown descriptor " + name);
    expect_keys(e, {"metric", "order", "k", "min", "max", "mode", "alpha"}, "settings");
    QuerySettings q;
    if (!e["metric"].is_null()) {
      q.metric = parse_metric(get_string(e["metric"], "metric"));
      if (!q.metric) corrupt("unknown metric");
    }
    if (!e["order"].is_null()) {
      q.order = parse_order(get_string(e["order"], "order"));
      if (!q.order) corrupt("unknown order");
    }
    if (!e["k"].is_number_unsigned()) corrupt("k must be a positive integer");
    q.k = e["k"].get<std::size_t>();
    q.min = get_optional_number(e["min"], "min");
    q.max = get_optional_number(e["max"], "max");
    const auto mode = parse_mode(get_string(e["mode"], "mode"));
    if (!mode) corrupt("unknown mode");
    q.mode = *mode;
    q.alpha = get_optional_number(e["alpha"], "alpha");
    try {
      q.to_query(*kind).validate();
    } catch (const Error& err) {
      corrupt(err.what());
    }
    s.settings[*kind] = q;
  }
  return s;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace guidepost
