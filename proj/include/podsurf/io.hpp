#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace podsurf::io {

/// Shortest decimal that parses back to exactly the same double.
std::string format_double(double value);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// Splits a comma-separated line and parses each cell as a double.
/// Throws InvalidArgument on malformed cells.
std::vector<double> parse_csv_row(std::string_view line);

}  // namespace podsurf::io
