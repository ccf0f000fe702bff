#include "csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string_view>

namespace annmoc::app {

namespace {

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) out << ',';
        out << cells[k];
    }
    out << '\n';
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) return k;
    }
    throw std::out_of_range("csv: no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::numbers(std::string_view name) const {
    const std::size_t c = column(name);
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto& row : rows) {
        const std::string& cell = row.at(c);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
        if (ec != std::errc() || ptr != cell.data() + cell.size()) {
            throw std::runtime_error("csv: '" + cell + "' in column " + std::string(name) + " is not a number");
        }
        values.push_back(value);
    }
    return values;
}

void write_csv(std::ostream& out, const CsvTable& table) {
    write_row(out, table.header);
    for (const auto& row : table.rows) {
        write_row(out, row);
    }
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("csv: missing header");
    }
    table.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != table.header.size()) {
            throw std::runtime_error("csv: row has " + std::to_string(cells.size()) + " cells, header has " +
                                     std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    write_csv(out, table);
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

CsvTable read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return read_csv(in);
}

}  // namespace annmoc::app
