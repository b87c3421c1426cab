#pragma once

#include <map>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "guidepost/dataset.hpp"
#include "guidepost/engine.hpp"

namespace guidepost {

using Json = nlohmann::ordered_json;

/// Request parameters by name, as given on a query string or CLI flags.
using Params = std::map<std::string, std::string>;

// Parameter parsing shared by the service and the CLI, so both reject the
// same inputs with the same messages. Unknown names are invalid_argument.
GuidepostQuery parse_guidepost_query(const Params& params);
NeighborhoodQuery parse_neighborhood_query(const Params& params);
std::pair<DescriptorKind, Mode> parse_overview_query(const Params& params);

struct RowQuery {
  std::optional<RowFilter> filter;
  std::size_t limit = 100;
  std::size_t offset = 0;
};
/// `col` may be a column name or index; `op` defaults to eq.
RowQuery parse_row_query(const Dataset& dataset, const Params& params);

Json to_json(const ColumnMeta& meta);
Json columns_json(const Dataset& dataset);
Json to_json(const StrengthValue& value);
Json to_json(const VisualizationPayload& payload);
Json to_json(const Guidepost& guidepost);
Json guideposts_json(const Dataset& dataset, const GuidepostQuery& query, const std::vector<Guidepost>& list);
Json to_json(const Dataset& dataset, const NeighborhoodResult& result, const NeighborhoodQuery& query);
Json to_json(const Dataset& dataset, const Overview& overview);
Json to_json(const Dataset& dataset, const RowPage& page);
Json error_json(int status, std::string_view code, std::string_view message);

/// Compact text plus a trailing newline; the exact bytes served and printed.
std::string render(const Json& doc);

}  // namespace guidepost
