#include "screening/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "screening/errors.hpp"

namespace screening {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw NumericError("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

double parse_double(std::string_view s) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw ParameterError("not a number: '" + std::string(s) + "'");
    }
    return out;
}

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_double(v));
    rows.push_back(std::move(row));
}

std::size_t CsvTable::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ParameterError("csv: no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::column(std::string_view name) const {
    const std::size_t j = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(parse_double(r.at(j)));
    return out;
}

std::string CsvTable::to_string() const {
    std::ostringstream os;
    for (const auto& c : comments) os << "# " << c << "\n";
    auto write_row = [&os](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << "\n";
    };
    write_row(header);
    for (const auto& r : rows) write_row(r);
    return os.str();
}

CsvTable parse_csv(std::string_view text) {
    CsvTable t;
    std::istringstream in{std::string(text)};
    std::string line;
    bool have_header = false;
    auto split = [](const std::string& l) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ls(l);
        while (std::getline(ls, cell, ',')) out.push_back(cell);
        if (!l.empty() && l.back() == ',') out.emplace_back();
        return out;
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!have_header && line.rfind("#", 0) == 0) {
            t.comments.push_back(line.size() > 2 ? line.substr(2) : std::string());
            continue;
        }
        if (!have_header) {
            t.header = split(line);
            have_header = true;
        } else {
            t.rows.push_back(split(line));
        }
    }
    return t;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path.string() + "'");
    out << table.to_string();
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

}  // namespace screening
