#include "guidepost/json_io.hpp"

#include <charconv>
#include <set>

#include "guidepost/error.hpp"

namespace guidepost {

namespace {

void reject_unknown(const Params& params, std::initializer_list<std::string_view> known) {
  for (const auto& [name, value] : params) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      fail(ErrorCode::invalid_argument, "unknown parameter " + name);
    }
  }
}

const std::string* find(const Params& params, const char* name) {
  auto it = params.find(name);
  return it == params.end() ? nullptr : &it->second;
}

std::size_t parse_count(const std::string& text, const char* name) {
  std::size_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    fail(ErrorCode::invalid_argument, std::string("invalid value for ") + name + ": " + text);
  }
  return v;
}

double parse_number(const std::string& text, const char* name) {
  auto v = parse_real(text);
  if (!v) fail(ErrorCode::invalid_argument, std::string("invalid value for ") + name + ": " + text);
  return *v;
}

Mode parse_mode_param(const Params& params) {
  const auto* text = find(params, "mode");
  if (!text) return Mode::approximate;
  auto mode = parse_mode(*text);
  if (!mode) fail(ErrorCode::invalid_argument, "invalid value for mode: " + *text);
  return *mode;
}

DescriptorKind parse_descriptor_param(const Params& params) {
  const auto* text = find(params, "descriptor");
  if (!text) fail(ErrorCode::invalid_argument, "missing parameter descriptor");
  auto kind = parse_descriptor(*text);
  if (!kind) fail(ErrorCode::invalid_argument, "unknown descriptor " + *text);
  return *kind;
}

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json tuple_json(const std::vector<AttributeRef>& tuple) {
  Json out = Json::array();
  for (const auto& a : tuple) out.push_back({{"index", a.index}, {"name", a.name}});
  return out;
}

Json list_json(const std::vector<Guidepost>& list) {
  Json out = Json::array();
  for (const auto& g : list) out.push_back(to_json(g));
  return out;
}

}  // namespace

GuidepostQuery parse_guidepost_query(const Params& params) {
  reject_unknown(params, {"descriptor", "metric", "order", "k", "min", "max", "mode", "alpha"});
  GuidepostQuery q;
  q.kind = parse_descriptor_param(params);
  if (const auto* m = find(params, "metric")) {
    q.metric = parse_metric(*m);
    if (!q.metric) fail(ErrorCode::invalid_argument, "unknown metric " + *m);
  }
  if (const auto* o = find(params, "order")) {
    q.order = parse_order(*o);
    if (!q.order) fail(ErrorCode::invalid_argument, "invalid value for order: " + *o);
  }
  if (const auto* k = find(params, "k")) q.k = parse_count(*k, "k");
  if (const auto* v = find(params, "min")) q.min = parse_number(*v, "min");
  if (const auto* v = find(params, "max")) q.max = parse_number(*v, "max");
  if (const auto* v = find(params, "alpha")) q.alpha = parse_number(*v, "alpha");
  q.mode = parse_mode_param(params);
  q.validate();
  return q;
}

NeighborhoodQuery parse_neighborhood_query(const Params& params) {
  reject_unknown(params, {"k", "mode"});
  NeighborhoodQuery q;
  if (const auto* k = find(params, "k")) q.k = parse_count(*k, "k");
  q.mode = parse_mode_param(params);
  q.validate();
  return q;
}

std::pair<DescriptorKind, Mode> parse_overview_query(const Params& params) {
  reject_unknown(params, {"descriptor", "mode"});
  return {parse_descriptor_param(params), parse_mode_param(params)};
}

RowQuery parse_row_query(const Dataset& dataset, const Params& params) {
  reject_unknown(params, {"col", "op", "value", "limit", "offset"});
  RowQuery q;
  if (const auto* l = find(params, "limit")) q.limit = parse_count(*l, "limit");
  if (const auto* o = find(params, "offset")) q.offset = parse_count(*o, "offset");
  const auto* col = find(params, "col");
  const auto* op = find(params, "op");
  const auto* value = find(params, "value");
  if (!col) {
    if (op || value) fail(ErrorCode::invalid_argument, "malformed predicate: op and value need col");
    return q;
  }
  if (!value) fail(ErrorCode::invalid_argument, "malformed predicate: missing value");
  RowFilter f;
  if (auto named = dataset.find_column(*col)) {
    f.column = *named;
  } else {
    f.column = parse_count(*col, "col");
    if (f.column >= dataset.cols()) fail(ErrorCode::invalid_argument, "invalid column index " + *col);
  }
  if (op) {
    auto parsed = parse_row_op(*op);
    if (!parsed) fail(ErrorCode::invalid_argument, "malformed predicate: unknown op " + *op);
    f.op = *parsed;
  }
  f.value = *value;
  q.filter = std::move(f);
  return q;
}

Json to_json(const ColumnMeta& meta) {
  Json j;
  j["index"] = meta.index;
  j["name"] = meta.name;
  j["kind"] = to_string(meta.kind);
  j["missing_count"] = meta.missing_count;
  j["distinct_count"] = meta.kind == ColumnKind::categorical || meta.integer_valued
                            ? Json(meta.distinct_count)
                            : Json(nullptr);
  j["integer_valued"] = meta.integer_valued;
  return j;
}

Json columns_json(const Dataset& dataset) {
  Json cols = Json::array();
  for (const auto& m : dataset.columns()) cols.push_back(to_json(m));
  Json j;
  j["dataset_id"] = dataset.id();
  j["rows"] = dataset.rows();
  j["columns"] = std::move(cols);
  return j;
}

Json to_json(const StrengthValue& v) {
  Json aux = Json::object();
  const auto& a = v.aux;
  if (a.q1) aux["q1"] = *a.q1;
  if (a.q3) aux["q3"] = *a.q3;
  if (a.fence_low) aux["fence_low"] = *a.fence_low;
  if (a.fence_high) aux["fence_high"] = *a.fence_high;
  if (a.p_value) aux["p_value"] = *a.p_value;
  if (a.slope) aux["slope"] = *a.slope;
  if (a.intercept) aux["intercept"] = *a.intercept;
  if (a.entropy) aux["entropy"] = *a.entropy;
  if (a.distinct) aux["distinct"] = *a.distinct;
  if (a.sample_size) aux["sample_size"] = *a.sample_size;
  if (!a.outlier_values.empty()) aux["outlier_values"] = a.outlier_values;
  if (!a.top_frequencies.empty()) {
    Json top = Json::array();
    for (const auto& [value, count] : a.top_frequencies) top.push_back({{"value", value}, {"count", count}});
    aux["top_frequencies"] = std::move(top);
  }
  Json j;
  j["raw"] = v.raw;
  j["strength"] = v.strength;
  j["approximate"] = v.approximate;
  j["aux"] = std::move(aux);
  return j;
}

Json to_json(const VisualizationPayload& payload) {
  return std::visit(
      [](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        Json j;
        if constexpr (std::is_same_v<T, Histogram>) {
          j["type"] = "histogram";
          j["edges"] = p.edges;
          j["counts"] = p.counts;
        } else if constexpr (std::is_same_v<T, BoxPlot>) {
          j["type"] = "boxplot";
          j["min"] = p.min;
          j["q1"] = p.q1;
          j["median"] = p.median;
          j["q3"] = p.q3;
          j["max"] = p.max;
          j["fence_low"] = p.fence_low;
          j["fence_high"] = p.fence_high;
          j["outlier_count"] = p.outlier_count;
          j["outliers"] = p.outliers;
        } else if constexpr (std::is_same_v<T, Pareto>) {
          j["type"] = "pareto";
          j["categories"] = p.categories;
          j["counts"] = p.counts;
          j["cumulative"] = p.cumulative;
          j["folded_tail"] = p.folded_tail;
        } else {
          j["type"] = "scatter";
          j["x"] = p.x;
          j["y"] = p.y;
          j["slope"] = p.slope;
          j["intercept"] = p.intercept;
          j["population"] = p.population;
          j["sampled"] = p.sampled;
        }
        return j;
      },
      payload);
}

Json to_json(const Guidepost& g) {
  Json j;
  j["id"] = g.id;
  j["descriptor"] = to_string(g.kind);
  j["metric"] = to_string(g.metric);
  j["tuple"] = tuple_json(g.tuple);
  j["value"] = to_json(g.value);
  j["chart"] = to_string(describe(g.kind).chart);
  j["payload"] = to_json(g.payload);
  j["approximate"] = g.approximate;
  return j;
}

Json guideposts_json(const Dataset& dataset, const GuidepostQuery& query, const std::vector<Guidepost>& list) {
  Json j;
  j["dataset_id"] = dataset.id();
  j["descriptor"] = to_string(query.kind);
  j["metric"] = to_string(query.effective_metric());
  j["order"] = to_string(query.effective_order());
  j["k"] = query.k;
  j["min"] = optional_json(query.min);
  j["max"] = optional_json(query.max);
  j["mode"] = to_string(query.mode);
  j["alpha"] = query.effective_metric() == Metric::significance_adjusted_pearson ? Json(query.effective_alpha())
                                                                                 : Json(nullptr);
  j["guideposts"] = list_json(list);
  return j;
}

Json to_json(const Dataset& dataset, const NeighborhoodResult& r, const NeighborhoodQuery& query) {
  Json focus;
  focus["id"] = r.focus_id;
  focus["descriptor"] = to_string(r.focus.kind);
  std::vector<AttributeRef> tuple;
  for (auto c : r.focus.tuple) tuple.push_back({c, dataset.column(c).name});
  focus["tuple"] = tuple_json(tuple);
  Json j;
  j["dataset_id"] = dataset.id();
  j["focus"] = std::move(focus);
  j["k"] = query.k;
  j["mode"] = to_string(query.mode);
  j["x_bar"] = list_json(r.x_bar);
  j["y_bar"] = list_json(r.y_bar);
  j["xy_bar"] = list_json(r.xy_bar);
  return j;
}

Json to_json(const Dataset& dataset, const Overview& o) {
  Json j;
  j["dataset_id"] = dataset.id();
  j["descriptor"] = to_string(o.kind);
  j["metric"] = to_string(o.metric);
  j["mode"] = to_string(o.mode);
  j["columns"] = tuple_json(o.columns);
  if (describe(o.kind).arity == 1) {
    Json values = Json::array();
    for (const auto& v : o.values) values.push_back(optional_json(v));
    j["values"] = std::move(values);
  } else {
    Json matrix = Json::array();
    for (const auto& row : o.matrix) {
      Json r = Json::array();
      for (const auto& v : row) r.push_back(optional_json(v));
      matrix.push_back(std::move(r));
    }
    j["matrix"] = std::move(matrix);
  }
  return j;
}

Json to_json(const Dataset& dataset, const RowPage& page) {
  std::vector<AttributeRef> cols;
  for (auto c : page.projection) cols.push_back({c, dataset.column(c).name});
  Json rows = Json::array();
  for (std::size_t i = 0; i < page.row_indices.size(); ++i) {
    Json cells = Json::array();
    for (const auto& cell : page.cells[i]) cells.push_back(optional_json(cell));
    rows.push_back({{"row", page.row_indices[i]}, {"cells", std::move(cells)}});
  }
  Json j;
  j["dataset_id"] = dataset.id();
  j["total"] = page.total;
  j["offset"] = page.offset;
  j["limit"] = page.limit;
  j["columns"] = tuple_json(cols);
  j["rows"] = std::move(rows);
  return j;
}

Json error_json(int status, std::string_view code, std::string_view message) {
  Json e;
  e["status"] = status;
  e["code"] = code;
  e["message"] = message;
  return Json{{"error", std::move(e)}};
}

std::string render(const Json& doc) {
  return doc.dump(-1, ' ', false, Json::error_handler_t::replace) + "\n";
}

}  // namespace guidepost
