#include "guidepost/csv.hpp"

#include "guidepost/error.hpp"

namespace guidepost::csv {

void read_records(std::string_view text, char delimiter,
                  const std::function<void(std::vector<std::string>&, std::size_t)>& on_record) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // anything seen for the current record
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_record = [&] {
    fields.push_back(std::move(field));
    field.clear();
    bool blank = fields.size() == 1 && fields[0].empty() && !field_started;
    if (!blank) on_record(fields, record_line);
    fields.clear();
    field_started = false;
  };

  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty()) {
        fail(ErrorCode::parse_error,
             "unexpected quote inside unquoted field at line " + std::to_string(line));
      }
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\r' && i + 1 < n && text[i + 1] == '\n') {
      // CRLF: the LF ends the record on the next iteration
    } else if (c == '\n') {
      end_record();
      ++line;
      record_line = line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) {
    fail(ErrorCode::parse_error, "unterminated quoted field starting near line " +
                                     std::to_string(record_line));
  }
  if (field_started || !field.empty()) end_record();
}

}  // namespace guidepost::csv
