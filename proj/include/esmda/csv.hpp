#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "esmda/la.hpp"

// CSV helpers: comma delimiter, '.' decimal separator, LF line endings.
// Values are written in the shortest form that parses back to the exact
// same double, so read-after-write is lossless. Parsing is locale-free.

namespace esmda::csv {

/// Shortest exact decimal representation of v.
std::string format_value(double v);

/// Strict double parse of a whole field; throws ConfigError on junk.
double parse_value(std::string_view field, const std::string& context);

void write_row(std::ostream& out, const double* values, std::size_t n);

struct Table {
    std::vector<std::string> header; // empty when the file had no header
    la::Matrix values;
};

/// Reads a rectangular numeric table. A first line that does not parse as
/// numbers is treated as a header. `source` names the stream in errors.
Table read_table(std::istream& in, const std::string& source);

Table read_table_file(const std::filesystem::path& path);

/// All numeric fields of the file flattened row-by-row.
la::Vector read_vector_file(const std::filesystem::path& path);

} // namespace esmda::csv
