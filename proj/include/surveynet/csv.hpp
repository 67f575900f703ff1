#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace surveynet::csv {

using Row = std::vector<std::string>;

/// RFC 4180: comma separated, double-quote quoting, CRLF or LF line ends. A UTF-8 BOM is skipped.
/// Blank lines are dropped.
std::vector<Row> parse(std::string_view text);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string format_row(const Row& row);

} // namespace surveynet::csv
