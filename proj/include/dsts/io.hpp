#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace dsts::io {

/// Reads a whole file; throws DataError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Decimal text with 17 significant digits; parses back to the identical double.
std::string format_double(double v);

/// Strict decimal parse of a whole field; throws DataError with `context` on failure.
double parse_double(std::string_view text, std::string_view context);
long long parse_int(std::string_view text, std::string_view context);

}  // namespace dsts::io
