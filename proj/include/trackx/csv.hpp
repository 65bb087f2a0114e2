#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace trackx::csv {

using Row = std::vector<std::string>;

// RFC 4180 style: comma separated, double-quoted fields with "" escapes,
// CRLF or LF line ends. Blank lines are skipped. A leading UTF-8 BOM is
// ignored.
std::vector<Row> parse(std::string_view text);

std::string quote(std::string_view field);

}  // namespace trackx::csv
