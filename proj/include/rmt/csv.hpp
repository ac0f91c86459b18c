#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rmt::csv {

/// Comma-separated fields with surrounding whitespace trimmed. No quoting:
/// every file format in this project is plain numeric/identifier data.
std::vector<std::string> split(std::string_view line);

/// Lines of a text file, trailing '\r' removed, blank lines dropped.
/// Throws IoError naming the path when it cannot be opened.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Shortest decimal that round-trips the double.
std::string format(double value);

/// Parses a decimal; returns false for empty, NA-like or malformed fields.
bool parse_double(std::string_view field, double& out);

/// Column position of `name` in a header row, or npos.
std::size_t column(const std::vector<std::string>& header, std::string_view name);

}  // namespace rmt::csv
