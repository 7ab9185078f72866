#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace screening {

/// Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite values.
[[nodiscard]] std::string format_double(double v);
[[nodiscard]] double parse_double(std::string_view s);

/// Comma-separated table with leading `#` comment lines and one header row.
struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
    [[nodiscard]] std::size_t column_index(std::string_view name) const;
    [[nodiscard]] std::vector<double> column(std::string_view name) const;
    [[nodiscard]] std::string to_string() const;
};

[[nodiscard]] CsvTable parse_csv(std::string_view text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

}  // namespace screening
