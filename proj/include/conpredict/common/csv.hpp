#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace conpredict::csv {

/// A parsed comma-separated table: one header row plus data rows.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name, or -1.
    int column(std::string_view name) const;
    /// Column index by name; throws InputError naming the column when absent.
    std::size_t require(std::string_view name) const;
};

Table parse(std::string_view text);
Table read_file(const std::string& path);

void write_row(std::ostream& out, const std::vector<std::string>& fields);
void write(std::ostream& out, const Table& table);
void write_file(const std::string& path, const Table& table);

/// Shortest text that parses back to the same double ("9", "0.25", "1e-09").
std::string format_number(double v);
double parse_number(std::string_view text);

}  // namespace conpredict::csv
