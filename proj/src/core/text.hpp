#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace aforge {

std::vector<std::string_view> split_lines(std::string_view text);

// Whitespace tokens of a line with any `#` comment removed.
std::vector<std::string_view> tokenize(std::string_view line);

// Strict parses: the whole token must be consumed. Failures throw kFormat
// errors prefixed with `what`.
long parse_integer(std::string_view token, const std::string& what);
double parse_real(std::string_view token, const std::string& what);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace aforge
