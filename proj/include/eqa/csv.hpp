#pragma once

#include <string>
#include <vector>

namespace eqa {

/// Parses a CSV file into rows of cells. Handles quoted fields, embedded
/// commas/quotes, CRLF line endings, and a UTF-8 BOM. Empty lines are skipped.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

/// Splits one CSV record. Exposed for the loaders' error reporting.
std::vector<std::string> split_csv_line(const std::string& line);

/// Shortest round-trip decimal rendering of a double (std::to_chars), so a
/// value written to CSV parses back to the identical bits and repeated runs
/// emit identical files.
std::string format_double(double v);

/// Quotes a cell if it contains a comma, quote, or newline.
std::string csv_escape(const std::string& cell);

std::string trim(const std::string& s);

/// strtod with full-string validation; returns false on trailing garbage.
bool parse_double(const std::string& s, double& out);

} // namespace eqa
