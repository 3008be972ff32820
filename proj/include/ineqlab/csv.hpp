#ifndef INEQLAB_CSV_HPP
#define INEQLAB_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace ineqlab {

// Scientific notation with 12 significant digits after the point.
inline std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

// One table: a column header, string cells, and a comment line echoing the
// configuration that produced it.
struct Csv {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::string config_echo;

    void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
};

inline void write_csv(const Csv& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SolverError("csv: cannot open " + path);
    if (!table.config_echo.empty()) out << "# config: " << table.config_echo << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << (c ? "," : "") << table.columns[c];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << "\n";
    }
}

} // namespace ineqlab

#endif
