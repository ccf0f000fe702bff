#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace annmoc::app {

/// A header row plus rows of already formatted cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of `name` in the header; throws std::out_of_range if absent.
    std::size_t column(std::string_view name) const;
    std::vector<double> numbers(std::string_view name) const;
};

/// Comma separated with '\n' line ends. Cells must not contain commas.
void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

/// File variants; both throw std::runtime_error when the file cannot be
/// opened or written.
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv_file(const std::filesystem::path& path);

}  // namespace annmoc::app
