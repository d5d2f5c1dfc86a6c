#pragma once

#include <string>
#include <vector>

namespace flowgru {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Minimal RFC-4180-ish reader: comma separated, double quotes enclose
// fields that contain commas/quotes/newlines, "" is an escaped quote.
// Every data row must have exactly as many cells as the header; a ragged
// row raises DataError naming the row.
CsvTable read_csv_file(const std::string& path);

// Splits one line (no embedded newlines) by the same rules.
std::vector<std::string> split_csv_line(const std::string& line);

// Quotes a value only when needed.
std::string csv_quote(const std::string& value);

// Strict numeric parse: optional surrounding whitespace, the whole cell
// must be consumed, and the value must be finite. Returns false otherwise.
bool parse_csv_number(const std::string& cell, double& out);

}  // namespace flowgru
