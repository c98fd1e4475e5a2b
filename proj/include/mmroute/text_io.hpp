#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmroute {

// Delimited-text helpers shared by the outcome, pool, and export formats.
// Fields are comma-separated without quoting; ids must not contain commas.

std::vector<std::string_view> split_fields(std::string_view line, char delim = ',');
std::string_view trim(std::string_view s);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace mmroute
