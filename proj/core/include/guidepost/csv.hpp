#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace guidepost::csv {

/// RFC-4180 style reader: quoted fields may contain delimiters, newlines and
/// doubled quotes. Accepts LF and CRLF line endings. A trailing newline does
/// not produce an empty record; blank lines are skipped.
///
/// `on_record` receives each record's fields and its 1-based line number.
void read_records(std::string_view text, char delimiter,
                  const std::function<void(std::vector<std::string>&, std::size_t)>& on_record);

}  // namespace guidepost::csv
