#include "guidepost/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "guidepost/csv.hpp"
#include "guidepost/error.hpp"
#include "guidepost/hashing.hpp"

namespace guidepost {

namespace {

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    char x = a[i], y = b[i];
    if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
    if (y >= 'A' && y <= 'Z') y = static_cast<char>(y - 'A' + 'a');
    if (x != y) return false;
  }
  return true;
}

constexpr double kMaxExactInteger = 9007199254740992.0;  // 2^53

bool is_integral(double v) { return std::abs(v) <= kMaxExactInteger && std::floor(v) == v; }

std::vector<std::string> unique_names(std::vector<std::string> names) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::string base = std::string(trim(names[i]));
    if (base.empty()) base = "column_" + std::to_string(i + 1);
    std::string candidate = base;
    for (int suffix = 2; seen.count(candidate) != 0; ++suffix) {
      candidate = base + "_" + std::to_string(suffix);
    }
    seen.insert(candidate);
    names[i] = std::move(candidate);
  }
  return names;
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
  return kind == ColumnKind::numeric ? "numeric" : "categorical";
}

bool is_missing_token(std::string_view cell) {
  cell = trim(cell);
  return cell.empty() || iequals(cell, "na") || iequals(cell, "nan");
}

std::optional<double> parse_real(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') {
    cell.remove_prefix(1);
    if (cell.empty() || cell.front() == '-' || cell.front() == '+') return std::nullopt;
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

ColumnKind infer_column_kind(std::span<const std::string> cells) {
  std::size_t present = 0;
  std::size_t parsed = 0;
  for (const auto& cell : cells) {
    if (is_missing_token(cell)) continue;
    ++present;
    if (parse_real(cell)) ++parsed;
  }
  if (present == 0) fail(ErrorCode::invalid_argument, "empty column");
  return static_cast<double>(parsed) >= kNumericParseThreshold * static_cast<double>(present)
             ? ColumnKind::numeric
             : ColumnKind::categorical;
}

std::string dataset_fingerprint(std::string_view bytes, const CsvOptions& options) {
  Fnv1a64 h;
  h.update("guidepost-dataset-v1");
  h.update(std::string_view(&options.delimiter, 1));
  h.update(options.header ? "h" : "-");
  h.update(bytes);
  return to_hex(h.digest());
}

// --- Dataset ---------------------------------------------------------------

Dataset::Dataset(std::string id, std::size_t rows, std::vector<ColumnMeta> meta,
                 std::vector<std::variant<NumericColumn, CategoricalColumn>> storage)
    : id_(std::move(id)), rows_(rows), meta_(std::move(meta)), storage_(std::move(storage)) {
  if (meta_.size() != storage_.size()) {
    fail(ErrorCode::internal, "column metadata and storage disagree");
  }
  std::unordered_set<std::string> names;
  for (std::size_t i = 0; i < meta_.size(); ++i) {
    if (!names.insert(meta_[i].name).second) {
      fail(ErrorCode::invalid_argument, "duplicate column name '" + meta_[i].name + "'");
    }
    std::size_t cells = std::visit(
        [](const auto& col) {
          if constexpr (std::is_same_v<std::decay_t<decltype(col)>, NumericColumn>) {
            return col.values.size();
          } else {
            return col.codes.size();
          }
        },
        storage_[i]);
    if (cells != rows_) fail(ErrorCode::internal, "column '" + meta_[i].name + "' has wrong length");
  }
}

const ColumnMeta& Dataset::column(std::size_t index) const {
  if (index >= meta_.size()) {
    fail(ErrorCode::invalid_argument, "invalid column index " + std::to_string(index));
  }
  return meta_[index];
}

const NumericColumn& Dataset::numeric(std::size_t index) const {
  column(index);
  const auto* col = std::get_if<NumericColumn>(&storage_[index]);
  if (col == nullptr) fail(ErrorCode::invalid_argument, "column '" + meta_[index].name + "' is not numeric");
  return *col;
}

const CategoricalColumn& Dataset::categorical(std::size_t index) const {
  column(index);
  const auto* col = std::get_if<CategoricalColumn>(&storage_[index]);
  if (col == nullptr) {
    fail(ErrorCode::invalid_argument, "column '" + meta_[index].name + "' is not categorical");
  }
  return *col;
}

std::vector<double> Dataset::present_values(std::size_t index) const {
  const auto& col = numeric(index);
  std::vector<double> out;
  out.reserve(rows_ - meta_[index].missing_count);
  for (std::size_t i = 0; i < rows_; ++i) {
    if (!col.missing[i]) out.push_back(col.values[i]);
  }
  return out;
}

std::vector<std::pair<std::string, std::uint64_t>> Dataset::value_counts(std::size_t index) const {
  const auto& meta = column(index);
  std::map<std::string, std::uint64_t> counts;
  if (meta.kind == ColumnKind::categorical) {
    const auto& col = categorical(index);
    std::vector<std::uint64_t> by_code(col.dictionary.size(), 0);
    for (auto code : col.codes) {
      if (code != CategoricalColumn::kMissing) ++by_code[static_cast<std::size_t>(code)];
    }
    for (std::size_t c = 0; c < by_code.size(); ++c) {
      if (by_code[c] > 0) counts[col.dictionary[c]] += by_code[c];
    }
  } else {
    if (!meta.integer_valued) {
      fail(ErrorCode::invalid_argument,
           "column '" + meta.name + "' is neither categorical nor integer-valued");
    }
    std::map<double, std::uint64_t> by_value;
    const auto& col = numeric(index);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!col.missing[i]) ++by_value[col.values[i] == 0.0 ? 0.0 : col.values[i]];
    }
    for (const auto& [v, c] : by_value) counts[format_real(v)] += c;
  }
  return {counts.begin(), counts.end()};
}

std::optional<std::string> Dataset::cell_text(std::size_t row, std::size_t col) const {
  if (row >= rows_) fail(ErrorCode::invalid_argument, "row out of range");
  column(col);
  if (const auto* num = std::get_if<NumericColumn>(&storage_[col])) {
    if (num->missing[row]) return std::nullopt;
    return format_real(num->values[row]);
  }
  const auto& cat = std::get<CategoricalColumn>(storage_[col]);
  auto code = cat.codes[row];
  if (code == CategoricalColumn::kMissing) return std::nullopt;
  return cat.dictionary[static_cast<std::size_t>(code)];
}

std::optional<std::size_t> Dataset::find_column(std::string_view name) const {
  for (const auto& m : meta_) {
    if (m.name == name) return m.index;
  }
  return std::nullopt;
}

// --- ingest ------------------------------------------------------------------

Dataset ingest_csv(std::string_view bytes, const CsvOptions& options) {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> cells;  // column-major
  std::size_t rows = 0;
  bool first = true;

  csv::read_records(bytes, options.delimiter, [&](std::vector<std::string>& fields, std::size_t line) {
    if (first) {
      first = false;
      cells.resize(fields.size());
      if (options.header) {
        header = std::move(fields);
        return;
      }
      for (std::size_t i = 0; i < fields.size(); ++i) header.push_back("column_" + std::to_string(i + 1));
    }
    if (fields.size() != cells.size()) {
      fail(ErrorCode::parse_error, "inconsistent column count at line " + std::to_string(line) +
                                       ": expected " + std::to_string(cells.size()) + ", found " +
                                       std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) cells[i].push_back(std::move(fields[i]));
    ++rows;
  });

  if (rows == 0) fail(ErrorCode::parse_error, "zero data rows");

  auto names = unique_names(std::move(header));
  std::vector<ColumnMeta> meta;
  std::vector<std::variant<NumericColumn, CategoricalColumn>> storage;
  meta.reserve(cells.size());
  storage.reserve(cells.size());

  for (std::size_t c = 0; c < cells.size(); ++c) {
    ColumnMeta m;
    m.index = c;
    m.name = names[c];
    bool all_missing = std::all_of(cells[c].begin(), cells[c].end(),
                                   [](const std::string& s) { return is_missing_token(s); });
    m.kind = all_missing ? ColumnKind::numeric : infer_column_kind(cells[c]);

    if (m.kind == ColumnKind::numeric) {
      NumericColumn col;
      col.values.resize(rows, std::numeric_limits<double>::quiet_NaN());
      col.missing.resize(rows, 1);
      bool integral = true;
      std::size_t present = 0;
      for (std::size_t r = 0; r < rows; ++r) {
        const auto& cell = cells[c][r];
        if (is_missing_token(cell)) continue;
        if (auto v = parse_real(cell)) {
          col.values[r] = *v;
          col.missing[r] = 0;
          integral = integral && is_integral(*v);
          ++present;
        }
      }
      m.missing_count = rows - present;
      m.integer_valued = present > 0 && integral;
      if (m.integer_valued) {
        std::unordered_set<double> distinct;
        for (std::size_t r = 0; r < rows; ++r) {
          if (!col.missing[r]) distinct.insert(col.values[r] == 0.0 ? 0.0 : col.values[r]);
        }
        m.distinct_count = distinct.size();
      }
      storage.emplace_back(std::move(col));
    } else {
      CategoricalColumn col;
      col.codes.resize(rows, CategoricalColumn::kMissing);
      std::unordered_map<std::string, std::int32_t> dict;
      for (std::size_t r = 0; r < rows; ++r) {
        auto& cell = cells[c][r];
        if (is_missing_token(cell)) {
          ++m.missing_count;
          continue;
        }
        auto [it, inserted] = dict.try_emplace(cell, static_cast<std::int32_t>(col.dictionary.size()));
        if (inserted) col.dictionary.push_back(cell);
        col.codes[r] = it->second;
      }
      m.distinct_count = col.dictionary.size();
      storage.emplace_back(std::move(col));
    }
    std::vector<std::string>().swap(cells[c]);
    meta.push_back(std::move(m));
  }

  return Dataset(dataset_fingerprint(bytes, options), rows, std::move(meta), std::move(storage));
}

Dataset ingest_csv(std::istream& source, const CsvOptions& options) {
  if (!source) fail(ErrorCode::parse_error, "unreadable source");
  std::string bytes{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  if (source.bad()) fail(ErrorCode::parse_error, "unreadable source");
  return ingest_csv(std::string_view(bytes), options);
}

// --- rows ------------------------------------------------------------------

std::optional<RowOp> parse_row_op(std::string_view text) {
  static constexpr std::pair<std::string_view, RowOp> kOps[] = {
      {"eq", RowOp::eq}, {"ne", RowOp::ne}, {"lt", RowOp::lt},           {"le", RowOp::le},
      {"gt", RowOp::gt}, {"ge", RowOp::ge}, {"between", RowOp::between}, {"outside", RowOp::outside},
  };
  for (const auto& [name, op] : kOps) {
    if (name == text) return op;
  }
  return std::nullopt;
}

std::string_view to_string(RowOp op) {
  switch (op) {
    case RowOp::eq: return "eq";
    case RowOp::ne: return "ne";
    case RowOp::lt: return "lt";
    case RowOp::le: return "le";
    case RowOp::gt: return "gt";
    case RowOp::ge: return "ge";
    case RowOp::between: return "between";
    case RowOp::outside: return "outside";
  }
  return "eq";
}

namespace {

struct CompiledFilter {
  std::size_t column;
  RowOp op;
  bool numeric;
  double a = 0.0, b = 0.0;
  std::int32_t code = CategoricalColumn::kMissing;  // category operand, kMissing if absent
};

CompiledFilter compile(const Dataset& ds, const RowFilter& f) {
  const auto& meta = ds.column(f.column);
  CompiledFilter out{f.column, f.op, meta.kind == ColumnKind::numeric};
  auto malformed = [&] {
    fail(ErrorCode::invalid_argument, "malformed predicate: " + std::string(to_string(f.op)) + " '" +
                                          f.value + "' on column '" + meta.name + "'");
  };
  if (out.numeric) {
    if (f.op == RowOp::between || f.op == RowOp::outside) {
      auto comma = f.value.find(',');
      if (comma == std::string::npos) malformed();
      auto lo = parse_real(std::string_view(f.value).substr(0, comma));
      auto hi = parse_real(std::string_view(f.value).substr(comma + 1));
      if (!lo || !hi || *lo > *hi) malformed();
      out.a = *lo;
      out.b = *hi;
    } else {
      auto v = parse_real(f.value);
      if (!v) malformed();
      out.a = *v;
    }
  } else {
    if (f.op != RowOp::eq && f.op != RowOp::ne) malformed();
    const auto& cat = ds.categorical(f.column);
    for (std::size_t i = 0; i < cat.dictionary.size(); ++i) {
      if (cat.dictionary[i] == f.value) out.code = static_cast<std::int32_t>(i);
    }
  }
  return out;
}

bool matches(const Dataset& ds, const CompiledFilter& f, std::size_t row) {
  if (f.numeric) {
    const auto& col = ds.numeric(f.column);
    if (col.missing[row]) return false;
    double v = col.values[row];
    switch (f.op) {
      case RowOp::eq: return v == f.a;
      case RowOp::ne: return v != f.a;
      case RowOp::lt: return v < f.a;
      case RowOp::le: return v <= f.a;
      case RowOp::gt: return v > f.a;
      case RowOp::ge: return v >= f.a;
      case RowOp::between: return v >= f.a && v <= f.b;
      case RowOp::outside: return v < f.a || v > f.b;
    }
    return false;
  }
  auto code = ds.categorical(f.column).codes[row];
  if (code == CategoricalColumn::kMissing) return false;
  return f.op == RowOp::eq ? code == f.code : code != f.code;
}

}  // namespace

RowPage get_rows(const Dataset& dataset, const std::optional<RowFilter>& filter,
                 std::span<const std::size_t> projection, std::size_t limit, std::size_t offset) {
  for (auto idx : projection) dataset.column(idx);
  std::optional<CompiledFilter> compiled;
  if (filter) compiled = compile(dataset, *filter);

  RowPage page;
  page.offset = offset;
  page.limit = limit;
  page.projection.assign(projection.begin(), projection.end());
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    if (compiled && !matches(dataset, *compiled, r)) continue;
    std::size_t ordinal = page.total++;
    if (ordinal < offset || ordinal - offset >= limit) continue;
    page.row_indices.push_back(r);
    auto& row = page.cells.emplace_back();
    row.reserve(projection.size());
    for (auto c : projection) row.push_back(dataset.cell_text(r, c));
  }
  return page;
}

}  // namespace guidepost
