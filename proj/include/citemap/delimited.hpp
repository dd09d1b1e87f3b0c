#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace citemap::delimited {

/// Splits one comma-delimited line. Fields may be double-quoted; a doubled
/// quote inside a quoted field is a literal quote. Throws DataError on an
/// unterminated quote. Embedded newlines are not supported.
std::vector<std::string> split_line(std::string_view line, char delim = ',');

/// Quotes a field only when it contains the delimiter, a quote or leading/trailing space.
std::string quote_field(std::string_view field, char delim = ',');

std::string join_fields(const std::vector<std::string>& fields, char delim = ',');

std::string_view trim(std::string_view s);

/// Splits on `sep`, trimming each piece and dropping empty pieces.
std::vector<std::string> split_list(std::string_view s, char sep = ';');

}  // namespace citemap::delimited
