#pragma once

#include <optional>
#include <string>
#include <vector>

namespace metroscale::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by name, or nullopt.
    std::optional<std::size_t> column(const std::string& name) const;
};

// Reads a whole CSV file.  Header row is mandatory.  Fields may be quoted
// with double quotes; embedded quotes are doubled.  Throws ParseError with
// the offending line number on ragged rows or unterminated quotes.
Table read_file(const std::string& path);

Table read_string(const std::string& text);

// Writes a table; fields containing separators/quotes are quoted.
void write_file(const std::string& path, const Table& table);

// Parses a decimal or scientific-notation number; throws ParseError
// (line 0) when the field is not a number.
double parse_number(const std::string& field);

}  // namespace metroscale::csv
