#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ma {

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

/// Strict double parse of the whole token. Throws InputError otherwise.
double parse_double(std::string_view text);

/// Strict integer parse of the whole token. Throws InputError otherwise.
std::int64_t parse_int(std::string_view text);

/// Percent-encodes '%', whitespace and control bytes so a string field can
/// never break token boundaries in line-oriented files.
std::string escape_field(std::string_view raw);
std::string unescape_field(std::string_view escaped);

/// Splits a line on runs of spaces/tabs. No empty tokens.
std::vector<std::string_view> split_tokens(std::string_view line);

}  // namespace ma
