#include "flowgru/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

#include "flowgru/errors.hpp"

namespace flowgru {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(std::move(cur));
    return cells;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && lineno > 1) continue;  // ignore stray blank lines
        auto cells = split_csv_line(line);
        if (lineno == 1) {
            table.header = std::move(cells);
        } else {
            if (cells.size() != table.header.size()) {
                throw DataError("'" + path + "' row " + std::to_string(lineno) + " has " +
                                std::to_string(cells.size()) + " fields, expected " +
                                std::to_string(table.header.size()));
            }
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

std::string csv_quote(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

bool parse_csv_number(const std::string& cell, double& out) {
    std::size_t b = 0, e = cell.size();
    while (b < e && std::isspace(static_cast<unsigned char>(cell[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(cell[e - 1]))) --e;
    if (b == e) return false;
    double v = 0.0;
    const auto res = std::from_chars(cell.data() + b, cell.data() + e, v);
    if (res.ec != std::errc() || res.ptr != cell.data() + e) return false;
    if (!std::isfinite(v)) return false;
    out = v;
    return true;
}

}  // namespace flowgru
