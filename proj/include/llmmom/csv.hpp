#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace llmmom::csv {

/// Splits one unquoted CSV line. Trailing '\r' is dropped.
std::vector<std::string_view> split(std::string_view line);

/// Shortest decimal text that parses back to exactly `v`.
std::string fmt(double v);

/// Parses a full-length decimal; throws std::invalid_argument otherwise.
double parse_double(std::string_view text);

/// Quotes a field when it contains a comma, quote or newline.
std::string quote(std::string_view field);

}  // namespace llmmom::csv
