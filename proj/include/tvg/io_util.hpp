#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tvg {

/// Shortest round-trip decimal form of a double (locale-free, via to_chars).
/// NaN prints as "nan" and infinities as "inf"/"-inf".
std::string format_double(double v);

/// Locale-free double parse of a full token; throws on trailing garbage.
double parse_double(const std::string& token, const std::string& context);

std::int64_t parse_int(const std::string& token, const std::string& context);

std::vector<std::string> split_csv_line(const std::string& line);

/// Reads all lines, dropping a trailing empty line and any '\r' endings.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace tvg
