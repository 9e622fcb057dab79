#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fdpfc {

/// Header plus rows of unquoted fields. Fields may not contain commas or
/// line breaks.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;
    const std::string& text(std::size_t row, const std::string& name) const;
};

/// Fixed, locale-independent rendering used by every data file.
std::string format_number(double v);

void write_csv(std::ostream& os, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

CsvTable read_csv(std::istream& is);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace fdpfc
