#include "fdpfc/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fdpfc {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

void check_field(const std::string& f) {
    if (f.find_first_of(",\n\r") != std::string::npos) {
        throw std::invalid_argument("csv field contains a separator: " + f);
    }
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::out_of_range("csv has no column " + name);
    return static_cast<std::size_t>(it - header.begin());
}

const std::string& CsvTable::text(std::size_t row, const std::string& name) const {
    return rows.at(row).at(column(name));
}

double CsvTable::number(std::size_t row, const std::string& name) const {
    const std::string& s = text(row, name);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("not a number in column " + name + ": " + s);
    }
    return v;
}

std::string format_number(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_csv(std::ostream& os, const CsvTable& table) {
    auto emit = [&os](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            check_field(fields[i]);
            if (i) os << ',';
            os << fields[i];
        }
        os << '\n';
    };
    emit(table.header);
    for (const auto& r : table.rows) {
        if (r.size() != table.header.size()) throw std::invalid_argument("csv row width mismatch");
        emit(r);
    }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_csv(os, table);
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty csv");
    t.header = split(line);
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = split(line);
        if (fields.size() != t.header.size()) {
            throw std::invalid_argument("csv row width mismatch at row " +
                                        std::to_string(t.rows.size() + 1));
        }
        t.rows.push_back(std::move(fields));
    }
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return read_csv(is);
}

}  // namespace fdpfc
